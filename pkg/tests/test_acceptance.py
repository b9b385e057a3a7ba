"""Acceptance suite: every criterion at its stated tolerance and time limit.

Each check prints one ``PASS`` / ``FAIL`` line. Run directly
(``python3 tests/test_acceptance.py``) for the verdict lines alone, or via
pytest, which repeats them in an "acceptance criteria" summary section.
"""

import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import circulant_tprod  # noqa: E402
from tpass.bounds import monte_carlo_validate  # noqa: E402
from tpass.completion import CompletionConfig, complete  # noqa: E402
from tpass.fourier import fft_tubes, ifft_tubes  # noqa: E402
from tpass.linalg import complex_qr, complex_svd_truncated, t_qr, truncated_tsvd  # noqa: E402
from tpass.sketch import (PassCountedSource, SketchPlan, derive_seed, passes_used,  # noqa: E402
                          rand_svd_passes, rand_svd_subspace, rand_tsvd_passes, rand_tsvd_subspace)
from tpass.synth import synth_image, synth_lowrank  # noqa: E402
from tpass.tensor import MaskTensor, Tensor3, fro_norm, mask_project, relative_error  # noqa: E402
from tpass.tproduct import tprod, ttranspose  # noqa: E402


def rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(a))


def criterion_1():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(100):
        n1, n2, n4, n3 = rng.integers(1, 9, size=4)
        x = Tensor3(rng.standard_normal((n1, n2, n3)))
        y = Tensor3(rng.standard_normal((n2, n4, n3)))
        ref = circulant_tprod(x.data, y.data)
        worst = max(worst, rel(ref, tprod(x, y).data))
    return worst <= 1e-10, f"max relative error {worst:.2e} over 100 draws (tol 1e-10)"


def criterion_2():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n1, n2, n3 in [(32, 32, 33), (32, 32, 32), (17, 9, 1), (5, 31, 2), (32, 20, 15), (3, 32, 24)]:
        x = Tensor3(rng.standard_normal((n1, n2, n3)))
        full = fft_tubes(x).full()
        lhs = fro_norm(x) ** 2
        rhs = float(np.sum(np.abs(full) ** 2)) / n3
        worst = max(worst, abs(lhs - rhs) / lhs)
    return worst <= 1e-12, f"max relative Parseval gap {worst:.2e} (tol 1e-12)"


def criterion_3():
    x = synth_lowrank(80, 80, 16, 12, seed=2024)
    exact = relative_error(x, truncated_tsvd(x, 12).reconstruct())
    # the sketch keeps all R + P = 12 components, which span the exact range
    classical = relative_error(x, rand_tsvd_subspace(
        x, SketchPlan(8, 4, power=1, seed=1, truncate=False)).reconstruct())
    passes = relative_error(x, rand_tsvd_passes(
        x, SketchPlan(8, 4, passes=2, seed=1, truncate=False)).reconstruct())
    ok = max(exact, classical, passes) <= 1e-10
    return ok, (f"truncated {exact:.1e}, classical q=1 {classical:.1e}, pass-efficient v=2 {passes:.1e} "
                f"(tol 1e-10)")


def criterion_4():
    x = synth_lowrank(30, 30, 6, 30, "poly", 1.0, seed=3)
    bad = []
    for q in range(4):
        src = PassCountedSource(x)
        rand_tsvd_subspace(src, SketchPlan(4, 2, power=q))
        if passes_used(src)[2] != 2 * q + 2:
            bad.append(f"q={q}:{passes_used(src)[2]}")
    for v in range(1, 9):
        src = PassCountedSource(x)
        rand_tsvd_passes(src, SketchPlan(4, 2, passes=v))
        if passes_used(src)[2] != v:
            bad.append(f"v={v}:{passes_used(src)[2]}")
    return not bad, "all counts exact" if not bad else "mismatches " + ", ".join(bad)


def criterion_5():
    x = synth_lowrank(40, 36, 6, 36, "poly", 1.0, seed=4)
    a = x.data[:, :, 0]
    worst = 0.0
    for q in range(3):
        sub = rand_tsvd_subspace(x, SketchPlan(6, 4, power=q, seed=11))
        pas = rand_tsvd_passes(x, SketchPlan(6, 4, passes=2 * q + 2, seed=11))
        worst = max(worst, abs(relative_error(x, sub.reconstruct()) - relative_error(x, pas.reconstruct())))
        u1, s1, v1 = rand_svd_subspace(a, SketchPlan(6, 4, power=q, seed=11))
        u2, s2, v2 = rand_svd_passes(a, SketchPlan(6, 4, passes=2 * q + 2, seed=11))
        worst = max(worst, abs(rel(a, (u1 * s1) @ v1.T) - rel(a, (u2 * s2) @ v2.T)))
    return worst <= 1e-10, f"max error difference {worst:.2e} (tol 1e-10)"


def criterion_6():
    x = synth_lowrank(40, 40, 8, 40, "poly", 1.0, seed=1)
    even = monte_carlo_validate(x, SketchPlan(5, 5, power=1, seed=6), trials=100)
    odd = monte_carlo_validate(x, SketchPlan(5, 5, passes=3, seed=6), trials=100)
    ok = even.satisfied and odd.satisfied
    return ok, (f"q=1: mean {even.mean_error:.4f} vs bound {even.bound:.4f}; "
                f"v=3: mean {odd.mean_error:.4f} vs bound {odd.bound:.4f}")


def criterion_7():
    x = synth_lowrank(40, 40, 8, 40, "poly", 1.0, seed=1)
    means = []
    for v in (2, 4, 6, 8):
        errs = [relative_error(x, rand_tsvd_passes(x, SketchPlan(5, 5, passes=v, seed=derive_seed(77, t)))
                               .reconstruct()) for t in range(20)]
        means.append(float(np.mean(errs)))
    ok = all(b <= a + 1e-12 for a, b in zip(means, means[1:]))
    return ok, "means " + " > ".join(f"{m:.6f}" for m in means)


def _corpus():
    rng = np.random.default_rng(8)
    return {
        "exact-rank": synth_lowrank(40, 30, 6, 8, seed=5),
        "poly-decay": synth_lowrank(40, 40, 8, 40, "poly", 1.0, seed=6),
        "exp-decay": synth_lowrank(30, 40, 5, 30, "exp", 0.3, seed=7),
        "gaussian": Tensor3(rng.standard_normal((30, 25, 7))),
        "image": synth_image(32, 32, 10, 3, seed=8),
    }


def criterion_8():
    worst_margin, count = np.inf, 0
    for name, x in _corpus().items():
        for rank in (3, 6):
            best = relative_error(x, truncated_tsvd(x, rank).reconstruct())
            plans = [SketchPlan(rank, p, power=q, seed=s) for q in (0, 1, 2) for p in (0, 3) for s in (0, 1)]
            plans += [SketchPlan(rank, p, passes=v, seed=s, random_mode=m)
                      for v in range(1, 7) for p in (0, 3) for s in (0, 1)
                      for m in ("first-slice-gaussian", "dense-gaussian")]
            for plan in plans:
                f = rand_tsvd_passes(x, plan) if plan.passes is not None else rand_tsvd_subspace(x, plan)
                worst_margin = min(worst_margin, relative_error(x, f.reconstruct()) - best)
                count += 1
    return worst_margin >= -1e-9, f"{count} randomized runs, smallest excess over optimum {worst_margin:.2e}"


def criterion_9():
    truth = synth_image(64, 64, 10, 3, seed=0)
    mask = MaskTensor.random(truth.dims, 0.2, seed=1)
    observed = mask_project(truth, mask)
    bitwise = []

    def check(_, c):
        bitwise.append(np.array_equal(c.data[mask.flags], observed.data[mask.flags]))

    cfg = CompletionConfig(ranks=(5, 10), passes=2, oversample=10, seed=0)
    _, rep = complete(observed, mask, cfg, truth=truth, callback=check)
    ok_err = rep.relative_error <= 0.1
    ok_psnr = rep.psnr_standard > rep.baseline_psnr_standard
    ok = ok_err and ok_psnr and all(bitwise)
    return ok, (f"relative error {rep.relative_error:.3f} (tol 0.1: {'met' if ok_err else 'NOT met'}), "
                f"PSNR {rep.psnr_standard:.2f} dB vs zero-fill {rep.baseline_psnr_standard:.2f} dB, "
                f"observed entries bitwise over {len(bitwise)} iterations: {all(bitwise)}")


def criterion_10():
    rng = np.random.default_rng(10)
    a, b = rng.standard_normal((30, 20)), rng.standard_normal((20, 12))
    ta, tb = Tensor3(a), Tensor3(b)
    diffs = {
        "tprod": np.max(np.abs(tprod(ta, tb).data[:, :, 0] - a @ b)),
        "transpose": np.max(np.abs(ttranspose(ta).data[:, :, 0] - a.T)),
        "fft": np.max(np.abs(ifft_tubes(fft_tubes(ta)).data[:, :, 0] - a)),
    }
    f = t_qr(ta)
    q, r = complex_qr(a)
    diffs["t_qr"] = max(np.max(np.abs(f.Q.data[:, :, 0] - q)), np.max(np.abs(f.R.data[:, :, 0] - r)))
    f = truncated_tsvd(ta, 5)
    u, s, v = complex_svd_truncated(a, 5)
    diffs["tsvd"] = max(np.max(np.abs(f.U.data[:, :, 0] - u)), np.max(np.abs(f.S.data[:, :, 0] - np.diag(s))),
                        np.max(np.abs(f.V.data[:, :, 0] - v)))
    for name, tensor_algo, matrix_algo, plan in [
        ("subspace", rand_tsvd_subspace, rand_svd_subspace, SketchPlan(5, 3, power=1, seed=4)),
        ("passes-even", rand_tsvd_passes, rand_svd_passes, SketchPlan(5, 3, passes=4, seed=4)),
        ("passes-odd", rand_tsvd_passes, rand_svd_passes, SketchPlan(5, 3, passes=3, seed=4)),
    ]:
        f = tensor_algo(ta, plan)
        u, s, v = matrix_algo(a, plan)
        diffs[name] = max(np.max(np.abs(f.U.data[:, :, 0] - u)), np.max(np.abs(f.S.data[:, :, 0] - np.diag(s))),
                          np.max(np.abs(f.V.data[:, :, 0] - v)))
    worst = max(diffs, key=diffs.get)
    return diffs[worst] <= 1e-12, f"max deviation {diffs[worst]:.1e} ({worst}) (tol 1e-12)"


CRITERIA = [
    (1, "t-product oracle equivalence", criterion_1, 10),
    (2, "Parseval identity", criterion_2, 5),
    (3, "exact-rank recovery", criterion_3, 30),
    (4, "pass-count exactness", criterion_4, 30),
    (5, "even-pass equivalence", criterion_5, 20),
    (6, "expected-error bound satisfaction", criterion_6, 60),
    (7, "error non-increasing in passes", criterion_7, 60),
    (8, "truncated t-SVD dominance", criterion_8, 30),
    (9, "completion of a synthetic colour image", criterion_9, 60),
    (10, "matrix reduction at I3 = 1", criterion_10, 10),
]


def evaluate(fn, limit):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed < limit
    return ok and in_time, f"{detail}; {elapsed:.2f} s (limit {limit} s{'' if in_time else ', EXCEEDED'})"


def verdict(number, title, passed, detail):
    return f"{'PASS' if passed else 'FAIL'} [{number:2d}] {title}: {detail}"


@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit, report_criterion):
    passed, detail = evaluate(fn, limit)
    report_criterion(verdict(number, title, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    failures = 0
    for number, title, fn, limit in CRITERIA:
        passed, detail = evaluate(fn, limit)
        failures += not passed
        print(verdict(number, title, passed, detail), flush=True)
    sys.exit(1 if failures else 0)
