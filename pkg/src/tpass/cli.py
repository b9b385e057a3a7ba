"""Command-line interface: ``tpass <command> ...``.

Every command writes its artifacts next to ``--out-prefix`` and embeds the
resolved parameters (including the seed) in its JSON report. Failures exit
nonzero and print a single JSON line ``{"error": ..., "message": ...}`` on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import BoundReport, monte_carlo_validate
from .completion import OPERATORS, CompletionConfig, complete
from .errors import TPassError
from .io import load_frames, load_image, load_mask, load_tensor, save_image, save_tensor
from .linalg import truncated_tsvd
from .sketch import (RANDOM_MODES, PassCountedSource, SketchPlan, derive_seed, passes_used,
                     rand_tsvd_passes, rand_tsvd_subspace)
from .synth import synth_lowrank
from .tensor import relative_error

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _ranks(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ranks, got {text!r}") from None


def _spec(args: argparse.Namespace) -> dict:
    d = {k: v for k, v in vars(args).items() if k != "func"}
    d["version"] = __version__
    return d


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _prefix(args) -> Path:
    p = Path(args.out_prefix)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _with_suffix(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


def _add_plan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rank", type=_positive, required=True)
    p.add_argument("--oversample", type=_nonnegative, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--passes", type=_positive, help="pass budget v (pass-efficient scheme)")
    g.add_argument("--power", type=_nonnegative, help="power iterations q (subspace iteration)")
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.add_argument("--random-mode", choices=RANDOM_MODES, default="first-slice-gaussian")


# -- commands ----------------------------------------------------------------

def cmd_tsvd(args) -> dict:
    if args.method == "exact" and (args.passes is not None or args.power is not None):
        raise UsageError("tsvd exact takes neither --passes nor --power")
    if args.method == "passes" and args.passes is None:
        raise UsageError("tsvd passes needs --passes")
    if args.method == "subspace" and args.passes is not None:
        raise UsageError("tsvd subspace needs --power, not --passes")
    x = load_tensor(args.input)
    src = PassCountedSource(x)
    start = time.perf_counter()
    if args.method == "exact":
        f = truncated_tsvd(x, args.rank)
    else:
        budget = ({"passes": args.passes} if args.method == "passes"
                  else {"power": args.power if args.power is not None else 1})
        plan = SketchPlan(args.rank, args.oversample, seed=args.seed, random_mode=args.random_mode,
                          truncate=not args.keep_oversampled, **budget)
        algo = rand_tsvd_passes if args.method == "passes" else rand_tsvd_subspace
        f = algo(src, plan)
    elapsed = time.perf_counter() - start
    prefix = _prefix(args)
    for name, t in (("U", f.U), ("S", f.S), ("V", f.V)):
        save_tensor(t, _with_suffix(prefix, f"_{name}.tns"))
    fwd, adj, total = passes_used(src)
    metrics = {
        "command": "tsvd",
        "spec": _spec(args),
        "dims": list(x.dims),
        "output_rank": f.rank,
        "relative_error": relative_error(x, f.reconstruct()),
        "passes_used": total,
        "forward_passes": fwd,
        "adjoint_passes": adj,
        "wall_time": elapsed,
    }
    _write_json(_with_suffix(prefix, ".json"), metrics)
    return metrics


def cmd_synth(args) -> dict:
    n1, n2, n3 = args.dims
    x = synth_lowrank(n1, n2, n3, args.rank, args.spectrum, args.rate, args.seed)
    save_tensor(x, args.out)
    return {"command": "synth", "spec": _spec(args), "dims": list(x.dims)}


_BOUND_DEFAULTS = {1: ("power", 1), 2: ("passes", 3), 3: ("power", 1), 4: ("passes", 3)}


def cmd_verify_bounds(args) -> dict:
    kind, default = _BOUND_DEFAULTS[args.theorem]
    if kind == "power" and args.passes is not None or kind == "passes" and args.power is not None:
        raise UsageError(f"theorem {args.theorem} is stated for --{kind}")
    matrix = args.theorem in (1, 2)
    if args.input is not None:
        x = load_tensor(args.input)
    else:
        n1, n2, n3 = args.dims
        x = synth_lowrank(n1, n2, 1 if matrix else n3, min(n1, n2), "poly", args.rate, args.seed)
    budget = {kind: getattr(args, kind) if getattr(args, kind) is not None else default}
    plan = SketchPlan(args.rank, args.oversample, seed=args.seed, random_mode=args.random_mode, **budget)
    rep = monte_carlo_validate(x, plan, trials=args.trials, theorem=args.theorem)
    prefix = _prefix(args)
    _with_suffix(prefix, ".csv").write_text(BoundReport.to_csv([rep]))
    payload = {"command": "verify-bounds", "spec": _spec(args), "plan": plan.to_dict(),
               "report": rep.to_dict()}
    _write_json(_with_suffix(prefix, ".json"), payload)
    return payload


def cmd_bench_passes(args) -> dict:
    if args.input is not None:
        x = load_tensor(args.input)
    else:
        n1, n2, n3 = args.dims
        x = synth_lowrank(n1, n2, n3, min(n1, n2), "poly", args.rate, args.seed)
    rows = []
    budgets = [("passes", v, v) for v in range(1, args.max_passes + 1)]
    budgets += [("subspace", q, 2 * q + 2) for q in range(args.max_power + 1)]
    for algo, param, total in budgets:
        errs, times = [], []
        for t in range(args.seeds):
            seed = derive_seed(args.seed, t)
            plan = (SketchPlan(args.rank, args.oversample, passes=param, seed=seed) if algo == "passes"
                    else SketchPlan(args.rank, args.oversample, power=param, seed=seed))
            start = time.perf_counter()
            f = (rand_tsvd_passes if algo == "passes" else rand_tsvd_subspace)(x, plan)
            times.append(time.perf_counter() - start)
            errs.append(relative_error(x, f.reconstruct()))
        rows.append((algo, param, total, float(np.mean(errs)), float(np.std(errs)), float(np.mean(times))))
    prefix = _prefix(args)
    lines = ["algorithm,parameter,passes,mean_relative_error,std_relative_error,mean_seconds"]
    lines += [f"{a},{p},{v},{e!r},{s!r},{t!r}" for a, p, v, e, s, t in rows]
    _with_suffix(prefix, ".csv").write_text("\n".join(lines) + "\n")
    payload = {"command": "bench-passes", "spec": _spec(args), "dims": list(x.dims), "rows": len(rows)}
    _write_json(_with_suffix(prefix, ".json"), payload)
    return payload


def cmd_complete(args) -> dict:
    observed = load_tensor(args.obs)
    mask = load_mask(args.mask)
    truth = load_tensor(args.truth) if args.truth else None
    cfg = CompletionConfig(ranks=tuple(args.ranks), passes=args.passes, oversample=args.oversample,
                           power=args.power, seed=args.seed, max_iter=args.iters, tol=args.tol,
                           operator=args.operator)
    c, rep = complete(observed, mask, cfg, truth=truth)
    prefix = _prefix(args)
    save_tensor(c, _with_suffix(prefix, ".tns"))
    _with_suffix(prefix, "_history.csv").write_text(rep.to_csv())
    payload = {"command": "complete", "spec": _spec(args), "report": rep.summary()}
    _write_json(_with_suffix(prefix, ".json"), payload)
    return payload


def cmd_img2tns(args) -> dict:
    src = Path(args.input)
    x = load_frames(src) if src.is_dir() else load_image(src)
    save_tensor(x, args.out)
    return {"command": "img2tns", "spec": _spec(args), "dims": list(x.dims)}


def cmd_tns2img(args) -> dict:
    x = load_tensor(args.input)
    save_image(x, args.out)
    return {"command": "tns2img", "spec": _spec(args), "dims": list(x.dims)}


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tpass", description="Randomized t-SVD experiments.")
    p.add_argument("--version", action="version", version=f"tpass {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tsvd", help="factorize a TNS3 tensor")
    t.add_argument("method", choices=("exact", "subspace", "passes"))
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--out-prefix", default="tsvd")
    t.add_argument("--keep-oversampled", action="store_true",
                   help="keep all R + P sketched components instead of truncating to R")
    _add_plan_flags(t)
    t.set_defaults(func=cmd_tsvd)

    s = sub.add_parser("synth", help="write a synthetic low-tubal-rank tensor")
    s.add_argument("--dims", type=_positive, nargs=3, required=True, metavar=("I1", "I2", "I3"))
    s.add_argument("--rank", type=_positive, required=True)
    s.add_argument("--spectrum", choices=("exact", "poly", "exp"), default="exact")
    s.add_argument("--rate", type=float, default=1.0)
    s.add_argument("--seed", type=_nonnegative, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("verify-bounds", help="Monte Carlo check of an expected-error bound")
    b.add_argument("--theorem", type=int, choices=(1, 2, 3, 4), required=True)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--in", dest="input")
    b.add_argument("--dims", type=_positive, nargs=3, default=[40, 40, 8], metavar=("I1", "I2", "I3"))
    b.add_argument("--rate", type=float, default=1.0, help="poly-decay rate of the synthetic input")
    b.add_argument("--rank", type=_positive, default=5)
    b.add_argument("--oversample", type=_nonnegative, default=5)
    g = b.add_mutually_exclusive_group()
    g.add_argument("--passes", type=_positive)
    g.add_argument("--power", type=_nonnegative)
    b.add_argument("--seed", type=_nonnegative, default=0)
    b.add_argument("--random-mode", choices=RANDOM_MODES, default="first-slice-gaussian")
    b.add_argument("--out-prefix", default="bounds")
    b.set_defaults(func=cmd_verify_bounds)

    bp = sub.add_parser("bench-passes", help="error and time versus pass count")
    bp.add_argument("--in", dest="input")
    bp.add_argument("--dims", type=_positive, nargs=3, default=[100, 100, 10], metavar=("I1", "I2", "I3"))
    bp.add_argument("--rate", type=float, default=1.0)
    bp.add_argument("--rank", type=_positive, default=10)
    bp.add_argument("--oversample", type=_nonnegative, default=5)
    bp.add_argument("--max-passes", type=_positive, default=8)
    bp.add_argument("--max-power", type=_nonnegative, default=3)
    bp.add_argument("--seeds", type=_positive, default=5)
    bp.add_argument("--seed", type=_nonnegative, default=0)
    bp.add_argument("--out-prefix", default="bench")
    bp.set_defaults(func=cmd_bench_passes)

    c = sub.add_parser("complete", help="low-tubal-rank completion of a masked tensor")
    c.add_argument("--obs", required=True)
    c.add_argument("--mask", required=True)
    c.add_argument("--truth")
    c.add_argument("--ranks", type=_ranks, default=[10])
    c.add_argument("--passes", type=_positive, default=2)
    c.add_argument("--power", type=_nonnegative, default=1)
    c.add_argument("--oversample", type=_nonnegative, default=10)
    c.add_argument("--iters", type=_positive, default=100)
    c.add_argument("--tol", type=float, default=1e-4)
    c.add_argument("--operator", choices=OPERATORS, default="pass-efficient")
    c.add_argument("--seed", type=_nonnegative, default=0)
    c.add_argument("--out-prefix", default="completed")
    c.set_defaults(func=cmd_complete)

    i = sub.add_parser("img2tns", help="PGM/PPM image (or directory of PGM frames) to TNS3")
    i.add_argument("input")
    i.add_argument("out")
    i.set_defaults(func=cmd_img2tns)

    o = sub.add_parser("tns2img", help="TNS3 tensor with 1 or 3 frontal slices to PGM/PPM")
    o.add_argument("input")
    o.add_argument("out")
    o.set_defaults(func=cmd_tns2img)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except TPassError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)
    print(json.dumps(_summary(result), default=_json_default))
    return 0


def _summary(result: dict) -> dict:
    keep = ("command", "relative_error", "passes_used", "dims", "output_rank")
    out = {k: result[k] for k in keep if k in result}
    if "report" in result:
        r = result["report"]
        out.update({k: r[k] for k in ("satisfied", "mean_error", "bound", "relative_error",
                                       "psnr_standard", "iterations") if k in r})
    return out


if __name__ == "__main__":
    sys.exit(main())
