"""Expected-error bounds for the randomized factorizations and their Monte Carlo check.

Conventions:

* Bounds are identified by an integer id (the ``theorem`` field and the
  CLI's ``--theorem`` flag): 1 = matrix, even pass budget (``q`` power
  iterations); 2 = matrix, odd budget; 3 = tensor, even budget; 4 = tensor,
  odd budget.
* Matrix bounds (ids 1 and 2) are returned squared; tensor bounds (ids 3
  and 4) are returned unsquared. :class:`BoundReport`
  always compares unsquared Frobenius errors, taking the square root of a
  matrix bound (valid by Jensen's inequality).
* The gap ``tau_R = sigma_{R+1} / sigma_R`` is taken as 0 when
  ``sigma_R == 0``; the tail is then 0 as well.
* ``v`` in the odd-pass bounds is the pass count, used verbatim in the
  exponent ``2 (2v - 1)``.
* Monte Carlo satisfaction allows ``3`` standard errors of statistical
  slack plus a floating-point floor of ``ROUNDOFF * ||X||_F``, so that an
  exact-rank input (bound 0 up to rounding) is judged correctly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, PlanError, RankError, TheoryPreconditionError
from .fourier import fft_tubes
from .sketch import (PassCountedSource, SketchPlan, derive_seed, rand_svd_passes,
                     rand_svd_subspace, run_plan)
from .tensor import Tensor3, as_tensor, fro_norm

ROUNDOFF = 1e-12


@dataclass(frozen=True)
class SpectralProfile:
    """Singular values of every Fourier slice, shape ``(I3, min(I1, I2))``, rows non-increasing."""

    values: np.ndarray

    @property
    def n3(self) -> int:
        return self.values.shape[0]

    def gap(self, rank: int) -> np.ndarray:
        """Per-slice ``sigma_{R+1} / sigma_R`` (0 where ``sigma_R`` vanishes)."""
        return np.array([_gap(row, rank) for row in self.values])

    def tail(self, rank: int) -> np.ndarray:
        """Per-slice discarded energy ``sum_{j>R} sigma_j^2``."""
        return np.sum(self.values[:, rank:] ** 2, axis=1)

    def frobenius_sq(self) -> float:
        return float(np.sum(self.values ** 2) / self.n3)


def _gap(sigma: np.ndarray, rank: int) -> float:
    if not 1 <= rank <= len(sigma):
        raise RankError(f"rank {rank} outside 1..{len(sigma)}")
    lead = sigma[rank - 1]
    nxt = sigma[rank] if rank < len(sigma) else 0.0
    return 0.0 if lead == 0 else float(nxt / lead)


def spectral_profile(x: Tensor3) -> SpectralProfile:
    xh = fft_tubes(x)
    stored = np.array([np.linalg.svd(xh.stored_slice(k), compute_uv=False)
                       for k in range(xh.n_stored)])
    n3 = xh.n3
    mirror = stored[1:n3 - xh.n_stored + 1][::-1]
    return SpectralProfile(np.concatenate([stored, mirror], axis=0))


def matrix_profile(x) -> np.ndarray:
    """Singular values of a matrix (or of a tensor with ``I3 == 1``)."""
    a = x.data[:, :, 0] if isinstance(x, Tensor3) else np.asarray(x, dtype=np.float64)
    return np.linalg.svd(a, compute_uv=False)


def _check_oversample(oversample: int) -> None:
    if oversample < 2:
        raise TheoryPreconditionError(f"bounds need oversampling P >= 2, got {oversample}")


def _check_odd(passes: int) -> None:
    if passes < 1 or passes % 2 == 0:
        raise TheoryPreconditionError(
            f"odd-pass bound needs odd v, got {passes}; use the even bound with q = (v - 2) / 2")


def _factor(rank: int, oversample: int, tau, exponent: int):
    return 1.0 + rank / (oversample - 1) * np.power(tau, exponent)


def bound_matrix_even(sigma, rank: int, oversample: int, power: int) -> float:
    """Squared-error bound ``(1 + R/(P-1) tau^{4q}) sum_{j>R} sigma_j^2``."""
    _check_oversample(oversample)
    sigma = np.asarray(sigma, dtype=np.float64)
    tail = float(np.sum(sigma[rank:] ** 2))
    return float(_factor(rank, oversample, _gap(sigma, rank), 4 * power) * tail)


def bound_matrix_odd(sigma, rank: int, oversample: int, passes: int) -> float:
    """Squared-error bound ``(1 + R/(P-1) tau^{2(2v-1)}) sum_{j>R} sigma_j^2``."""
    _check_oversample(oversample)
    _check_odd(passes)
    sigma = np.asarray(sigma, dtype=np.float64)
    tail = float(np.sum(sigma[rank:] ** 2))
    return float(_factor(rank, oversample, _gap(sigma, rank), 2 * (2 * passes - 1)) * tail)


def _tensor_bound(profile: SpectralProfile, rank, oversample, exponent) -> float:
    terms = _factor(rank, oversample, profile.gap(rank), exponent) * profile.tail(rank)
    return math.sqrt(float(np.sum(terms)) / profile.n3)


def bound_tensor_even(profile: SpectralProfile, rank: int, oversample: int, power: int) -> float:
    """Bound on ``E ||X - Q * Q^T * X||_F`` after ``q`` power iterations (unsquared)."""
    _check_oversample(oversample)
    return _tensor_bound(profile, rank, oversample, 4 * power)


def bound_tensor_odd(profile: SpectralProfile, rank: int, oversample: int, passes: int) -> float:
    """Bound on ``E ||X - X * Q * Q^T||_F`` for an odd pass budget ``v`` (unsquared)."""
    _check_oversample(oversample)
    _check_odd(passes)
    return _tensor_bound(profile, rank, oversample, 2 * (2 * passes - 1))


def optimal_error(profile: SpectralProfile, rank: int) -> float:
    """Frobenius error of the truncated t-SVD at ``rank``."""
    return math.sqrt(float(np.sum(profile.tail(rank))) / profile.n3)


def bound_deterministic_sketch(sigma, rank: int, power: int, omega1, omega2) -> float:
    """Per-draw bound ``||S2||^2 + tau^{2(2k-1)} ||S2 W2 W1^+||^2`` on ``||X (I - Q Q^T)||_F^2``.

    ``Q`` spans ``(X^T X)^k W`` for a test matrix ``W``; ``W1 = V1^T W`` and
    ``W2 = V2^T W`` are its components along the leading ``rank`` and the
    remaining right singular vectors. ``power`` is ``k``, the exponent of
    ``X^T X`` (``k = (v - 1) / 2`` for an odd budget of ``v`` passes).
    """
    if power < 1:
        raise TheoryPreconditionError("deterministic bound needs at least one X^T X application")
    sigma = np.asarray(sigma, dtype=np.float64)
    omega1 = np.atleast_2d(np.asarray(omega1, dtype=np.float64))
    omega2 = np.atleast_2d(np.asarray(omega2, dtype=np.float64))
    if omega1.shape[0] != rank or omega2.shape[0] != len(sigma) - rank:
        raise DimensionMismatch("Omega blocks do not match the rank split of the spectrum")
    if np.linalg.matrix_rank(omega1) < rank:
        raise TheoryPreconditionError("Omega1 is rank deficient")
    s2 = sigma[rank:]
    tail = float(np.sum(s2 ** 2))
    if tail == 0.0:
        return 0.0
    cross = (s2[:, None] * omega2) @ np.linalg.pinv(omega1)
    tau = _gap(sigma, rank)
    return tail + tau ** (2 * (2 * power - 1)) * float(np.sum(cross ** 2))


def split_test_matrix(x, rank: int, omega):
    """``(sigma, W1, W2)`` for a matrix ``x`` and test matrix ``omega``."""
    _, s, vh = np.linalg.svd(np.asarray(x, dtype=np.float64), full_matrices=False)
    w = vh @ np.asarray(omega, dtype=np.float64)
    return s, w[:rank], w[rank:]


@dataclass
class BoundReport:
    theorem: int
    rank: int
    oversample: int
    power: int | None
    passes: int | None
    bound: float
    mean_error: float
    std_error: float
    trials: int
    satisfied: bool
    seed: int = 0
    random_mode: str = "first-slice-gaussian"
    errors: list[float] = field(default_factory=list, repr=False)

    FIELDS = ("theorem", "rank", "oversample", "power", "passes", "bound", "mean_error",
              "std_error", "trials", "satisfied", "seed", "random_mode")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("errors")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self) -> list[str]:
        d = self.to_dict()
        return [_fmt(d[k]) for k in self.FIELDS]

    @classmethod
    def to_csv(cls, reports) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cls.FIELDS)
        for r in reports:
            w.writerow(r.csv_row())
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def theorem_for(plan: SketchPlan, matrix: bool) -> int:
    """Which bound governs ``plan``: even budgets -> 1/3, odd -> 2/4."""
    odd = plan.passes is not None and plan.passes % 2 == 1
    return (2 if odd else 1) if matrix else (4 if odd else 3)


def _even_power(plan: SketchPlan) -> int:
    if plan.power is not None:
        return plan.power
    return (plan.passes - 2) // 2


def monte_carlo_validate(x, plan: SketchPlan, trials: int = 100, theorem: int | None = None) -> BoundReport:
    """Mean projection error over ``trials`` independent draws vs. the matching bound.

    Matrix bounds (ids 1, 2) run the matrix algorithms on ``x`` (a 2-D array
    or a tensor with ``I3 == 1``); tensor bounds (ids 3, 4) run the t-SVD
    versions. Trial ``t`` uses seed ``derive_seed(plan.seed, t)``. The bound is
    satisfied when ``mean <= bound + 3 * std / sqrt(trials) + ROUNDOFF * ||X||_F``.
    """
    if trials < 30:
        raise PlanError("Monte Carlo validation needs at least 30 trials")
    if plan.passes is not None and plan.passes < 2:
        raise TheoryPreconditionError("bounds are stated for v >= 2 passes")
    matrix = theorem in (1, 2) if theorem is not None else (
        not isinstance(x, (Tensor3, PassCountedSource)) and np.ndim(x) == 2)
    expected = theorem_for(plan, matrix)
    if theorem is not None and theorem != expected:
        raise TheoryPreconditionError(f"bound {theorem} does not govern plan {plan} (expected {expected})")
    full = SketchPlan(**{**plan.to_dict(), "truncate": False})

    if matrix:
        a = x.data[:, :, 0] if isinstance(x, Tensor3) else np.asarray(x, dtype=np.float64)
        if isinstance(x, Tensor3) and x.dims[2] != 1:
            raise DimensionMismatch("matrix bounds need I3 == 1")
        sigma = matrix_profile(a)
        if expected == 1:
            sq = bound_matrix_even(sigma, plan.rank, plan.oversample, _even_power(plan))
        else:
            sq = bound_matrix_odd(sigma, plan.rank, plan.oversample, plan.passes)
        bound = math.sqrt(sq)
        scale = float(np.linalg.norm(a))
        algo = rand_svd_subspace if plan.power is not None else rand_svd_passes

        def one(seed):
            u, s, v = algo(a, SketchPlan(**{**full.to_dict(), "seed": seed}))
            return float(np.linalg.norm(a - (u * s) @ v.T))
    else:
        t = x.inner if isinstance(x, PassCountedSource) else as_tensor(x)
        prof = spectral_profile(t)
        scale = fro_norm(t)
        if expected == 3:
            bound = bound_tensor_even(prof, plan.rank, plan.oversample, _even_power(plan))
        else:
            bound = bound_tensor_odd(prof, plan.rank, plan.oversample, plan.passes)

        def one(seed):
            f = run_plan(t, SketchPlan(**{**full.to_dict(), "seed": seed}))
            return fro_norm(t - f.reconstruct())

    errs = [one(derive_seed(plan.seed, k)) for k in range(trials)]
    mean = float(np.mean(errs))
    std = float(np.std(errs, ddof=1))
    slack = 3.0 * std / math.sqrt(trials) + ROUNDOFF * scale
    return BoundReport(expected, plan.rank, plan.oversample, plan.power, plan.passes, bound,
                       mean, std, trials, bool(mean <= bound + slack), plan.seed,
                       plan.random_mode, errs)
