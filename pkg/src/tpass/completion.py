"""Low-tubal-rank tensor completion by alternating projection.

Each iteration replaces the current estimate by a low-rank approximation,
then writes the observed entries back::

    X <- L(C)
    C <- Omega (.) M + (1 - Omega) (.) X

The rank schedule is a list of tubal ranks; every stage runs until the
relative change between successive iterates drops below ``tol`` or
``max_iter`` iterations pass, then hands its estimate to the next stage.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import DimensionMismatch, PlanError, RankError
from .linalg import truncated_tsvd
from .sketch import SketchPlan, derive_seed, rand_svd_passes, rand_tsvd_passes, rand_tsvd_subspace
from .tensor import (MaskTensor, Tensor3, fro_norm, mask_project, psnr, psnr_standard,
                     relative_error)

Operator = Literal["pass-efficient", "classical", "exact", "matrix-passes"]
OPERATORS = ("pass-efficient", "classical", "exact", "matrix-passes")


@dataclass(frozen=True)
class CompletionConfig:
    ranks: Sequence[int] = (10,)
    passes: int = 2
    oversample: int = 10
    power: int = 1
    seed: int = 0
    max_iter: int = 100
    tol: float = 1e-4
    operator: Operator = "pass-efficient"
    smoothing: Callable[[Tensor3], Tensor3] | None = None

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        if not ranks or min(ranks) < 1:
            raise PlanError("rank schedule must be a non-empty list of positive ranks")
        if any(b < a for a, b in zip(ranks, ranks[1:])):
            raise PlanError(f"rank schedule must be non-decreasing, got {ranks}")
        if self.tol <= 0:
            raise PlanError("tolerance must be positive")
        if self.max_iter < 1:
            raise PlanError("max_iter must be >= 1")
        if self.operator not in OPERATORS:
            raise PlanError(f"unknown operator {self.operator!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranks"] = list(self.ranks)
        d["smoothing"] = None if self.smoothing is None else getattr(self.smoothing, "__name__", "custom")
        return d


@dataclass
class IterationRecord:
    iteration: int
    stage_rank: int
    relative_change: float
    observed_fit: float
    relative_error: float | None = None


@dataclass
class CompletionReport:
    config: dict
    history: list[IterationRecord] = field(default_factory=list)
    iterations: int = 0
    wall_time: float = 0.0
    psnr: float | None = None
    psnr_standard: float | None = None
    relative_error: float | None = None
    baseline_psnr_standard: float | None = None

    def summary(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "history"}
        for k in ("psnr", "psnr_standard", "baseline_psnr_standard"):
            if d[k] is not None and math.isinf(d[k]):
                d[k] = "EXACT"
        return d

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "stage_rank", "relative_change", "observed_fit", "relative_error"])
        for r in self.history:
            w.writerow([r.iteration, r.stage_rank, repr(r.relative_change), repr(r.observed_fit),
                        "" if r.relative_error is None else repr(r.relative_error)])
        return buf.getvalue()


def flatten_slices(x: Tensor3) -> np.ndarray:
    """``I1 x (I2 I3)`` matrix with the frontal slices side by side."""
    n1, n2, n3 = x.dims
    return x.data.reshape((n1, n2 * n3), order="F")


def unflatten_slices(m: np.ndarray, dims) -> Tensor3:
    return Tensor3._wrap(np.asarray(m).reshape(tuple(dims), order="F"))


def step_lowrank(c: Tensor3, rank: int, operator: Operator = "pass-efficient", *, passes: int = 2,
                 oversample: int = 10, power: int = 1, seed: int = 0) -> Tensor3:
    """Rank-``rank`` approximation of ``c`` with the chosen operator."""
    n1, n2, n3 = c.dims
    if operator == "matrix-passes":
        m = flatten_slices(c)
        if not 1 <= rank <= min(m.shape):
            raise RankError(f"rank {rank} outside 1..{min(m.shape)}")
        u, s, v = rand_svd_passes(m, SketchPlan(rank, oversample, passes=passes, seed=seed))
        return unflatten_slices((u * s) @ v.T, c.dims)
    if not 1 <= rank <= min(n1, n2):
        raise RankError(f"tubal rank {rank} outside 1..{min(n1, n2)}")
    if operator == "exact":
        return truncated_tsvd(c, rank).reconstruct()
    if operator == "pass-efficient":
        return rand_tsvd_passes(c, SketchPlan(rank, oversample, passes=passes, seed=seed)).reconstruct()
    if operator == "classical":
        return rand_tsvd_subspace(c, SketchPlan(rank, oversample, power=power, seed=seed)).reconstruct()
    raise PlanError(f"unknown operator {operator!r}")


def step_mask(observed: Tensor3, mask: MaskTensor, x: Tensor3) -> Tensor3:
    """Observed entries copied from ``observed``, the rest from ``x``."""
    if not observed.dims == mask.dims == x.dims:
        raise DimensionMismatch(f"dims {observed.dims}, {mask.dims}, {x.dims} differ")
    return Tensor3._wrap(np.where(mask.flags, observed.data, x.data))


def complete(observed: Tensor3, mask: MaskTensor, cfg: CompletionConfig,
             truth: Tensor3 | None = None,
             callback: Callable[[int, Tensor3], None] | None = None) -> tuple[Tensor3, CompletionReport]:
    """Fill the unobserved entries of ``observed``.

    ``callback(iteration, C)`` is invoked after every masking step.
    """
    if observed.dims != mask.dims:
        raise DimensionMismatch(f"observation {observed.dims} and mask {mask.dims} differ")
    if mask.count() == 0:
        raise ValueError("no observed entries")
    start = time.perf_counter()
    known = mask_project(observed, mask)
    report = CompletionReport(cfg.to_dict())
    c = known
    it = 0
    for rank in cfg.ranks:
        for _ in range(cfg.max_iter):
            src = cfg.smoothing(c) if cfg.smoothing is not None else c
            x = step_lowrank(src, rank, cfg.operator, passes=cfg.passes, oversample=cfg.oversample,
                             power=cfg.power, seed=derive_seed(cfg.seed, it))
            nxt = step_mask(known, mask, x)
            denom = fro_norm(c)
            change = fro_norm(nxt - c) / denom if denom > 0 else math.inf
            fit = fro_norm(mask_project(x, mask) - known)
            err = relative_error(truth, nxt) if truth is not None else None
            it += 1
            report.history.append(IterationRecord(it, rank, change, fit, err))
            c = nxt
            if callback is not None:
                callback(it, c)
            if change <= cfg.tol:
                break
    report.iterations = it
    report.wall_time = time.perf_counter() - start
    if truth is not None:
        report.relative_error = relative_error(truth, c)
        report.psnr = psnr(truth, c)
        report.psnr_standard = psnr_standard(truth, c)
        report.baseline_psnr_standard = psnr_standard(truth, known)
    return c, report


def psnr_trace(truth: Tensor3, estimate: Tensor3, standard: bool = True) -> list[float]:
    """PSNR of every frontal slice (frame), in order."""
    if truth is None:
        raise ValueError("ground truth is required for a PSNR trace")
    if truth.dims != estimate.dims:
        raise DimensionMismatch(f"dims {truth.dims} and {estimate.dims} differ")
    metric = psnr_standard if standard else psnr
    return [metric(Tensor3._wrap(truth.data[:, :, [k]]), Tensor3._wrap(estimate.data[:, :, [k]]))
            for k in range(truth.dims[2])]
