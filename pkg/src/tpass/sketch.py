"""Randomized truncated (t-)SVD: subspace iteration and the arbitrary-pass scheme.

Four entry points:

* :func:`rand_svd_subspace` / :func:`rand_tsvd_subspace` -- range finder with
  ``q`` power iterations, ``2q + 2`` passes over the data.
* :func:`rand_svd_passes` / :func:`rand_tsvd_passes` -- alternate between the
  column and row spaces for any pass budget ``v >= 1``.

A *pass* is one application of ``X`` or ``X^T`` to a block of ``R + P``
columns. Tensor routines read the data only through a
:class:`PassCountedSource`, so the budget is auditable.

With ``truncate=True`` (the default) the factors are cut to the target rank
``R``. With ``truncate=False`` all ``R + P`` sketched components are kept and
the reconstruction equals the projection of ``X`` onto the sketched subspace
(``Q Q^T X`` for even budgets, ``X Q Q^T`` for odd ones).
"""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .errors import DimensionMismatch, PlanError, RankError
from .linalg import TsvdFactors, complex_qr, complex_svd_truncated, t_qr, truncated_tsvd
from .tensor import Tensor3, as_tensor
from .tproduct import tprod, ttranspose

RandomMode = Literal["first-slice-gaussian", "dense-gaussian"]
RANDOM_MODES = ("first-slice-gaussian", "dense-gaussian")


@dataclass(frozen=True)
class SketchPlan:
    """Parameters of one randomized factorization.

    Exactly one of ``passes`` (arbitrary-pass scheme) or ``power``
    (subspace iteration) must be given.
    """

    rank: int
    oversample: int = 0
    passes: int | None = None
    power: int | None = None
    seed: int = 0
    random_mode: RandomMode = "first-slice-gaussian"
    truncate: bool = True

    def __post_init__(self):
        if self.rank < 1:
            raise PlanError(f"rank must be >= 1, got {self.rank}")
        if self.oversample < 0:
            raise PlanError(f"oversampling must be >= 0, got {self.oversample}")
        if (self.passes is None) == (self.power is None):
            raise PlanError("specify exactly one of passes or power")
        if self.passes is not None and self.passes < 1:
            raise PlanError(f"pass budget must be >= 1, got {self.passes}")
        if self.power is not None and self.power < 0:
            raise PlanError(f"power iterations must be >= 0, got {self.power}")
        if self.random_mode not in RANDOM_MODES:
            raise PlanError(f"unknown random mode {self.random_mode!r}")
        if not 0 <= self.seed < 2**64:
            raise PlanError("seed must be a 64-bit unsigned integer")

    @property
    def width(self) -> int:
        return self.rank + self.oversample

    @property
    def total_passes(self) -> int:
        return self.passes if self.passes is not None else 2 * self.power + 2

    def output_rank(self) -> int:
        return self.rank if self.truncate else self.width

    def check_target(self, n1: int, n2: int) -> None:
        if self.width > min(n1, n2):
            raise RankError(f"R + P = {self.width} exceeds min(I1, I2) = {min(n1, n2)}")

    def to_dict(self) -> dict:
        return asdict(self)


class PassCountedSource:
    """Read-only view of a data tensor that counts every sweep over it."""

    def __init__(self, x):
        self._x = as_tensor(x)
        self._lock = threading.Lock()
        self.forward_passes = 0
        self.adjoint_passes = 0

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._x.dims

    @property
    def inner(self) -> Tensor3:
        """Uncounted access, for evaluating results outside an algorithm."""
        return self._x

    def apply(self, b: Tensor3) -> Tensor3:
        """``X * b``; one forward pass."""
        with self._lock:
            self.forward_passes += 1
        return tprod(self._x, b)

    def apply_adjoint(self, b: Tensor3) -> Tensor3:
        """``X^T * b``; one adjoint pass."""
        with self._lock:
            self.adjoint_passes += 1
        return tprod(ttranspose(self._x), b)

    def reset(self) -> None:
        with self._lock:
            self.forward_passes = self.adjoint_passes = 0


def passes_used(src: PassCountedSource) -> tuple[int, int, int]:
    """``(forward, adjoint, total)``."""
    f, a = src.forward_passes, src.adjoint_passes
    return f, a, f + a


def _as_source(x) -> PassCountedSource:
    return x if isinstance(x, PassCountedSource) else PassCountedSource(x)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gaussian_random_tensor(n2: int, width: int, n3: int, seed: int = 0,
                           mode: RandomMode = "first-slice-gaussian") -> Tensor3:
    """Gaussian test tensor of shape ``n2 x width x n3`` from a seeded PCG64 stream.

    ``first-slice-gaussian`` fills only the first frontal slice (the other
    slices are exactly zero); ``dense-gaussian`` fills every entry. Values are
    drawn in canonical (mode-1 fastest) order.
    """
    if mode not in RANDOM_MODES:
        raise PlanError(f"unknown random mode {mode!r}")
    rng = _rng(seed)
    if mode == "first-slice-gaussian":
        data = np.zeros((n2, width, n3))
        data[:, :, 0] = rng.standard_normal(n2 * width).reshape((n2, width), order="F")
    else:
        data = rng.standard_normal(n2 * width * n3).reshape((n2, width, n3), order="F")
    return Tensor3._wrap(data)


def gaussian_matrix(n2: int, width: int, seed: int = 0) -> np.ndarray:
    """Same stream as :func:`gaussian_random_tensor` with ``n3 = 1``."""
    return _rng(seed).standard_normal(n2 * width).reshape((n2, width), order="F")


# -- matrices ----------------------------------------------------------------

def _check_matrix(x, plan: SketchPlan) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {x.shape}")
    plan.check_target(*x.shape)
    return x


def rand_svd_subspace(x, plan: SketchPlan):
    """Randomized subspace iteration; returns ``(U, s, V)`` with ``X ~= U diag(s) V^T``."""
    if plan.power is None:
        raise PlanError("subspace iteration needs power (q)")
    x = _check_matrix(x, plan)
    omega = gaussian_matrix(x.shape[1], plan.width, plan.seed)
    basis, _ = complex_qr(x @ omega)
    for _ in range(plan.power):
        co, _ = complex_qr(x.T @ basis)
        basis, _ = complex_qr(x @ co)
    co, r = complex_qr(x.T @ basis)
    # r = V_hat S U_hat^H, so X ~= basis r^T co^T = (basis U_hat) S (co V_hat)^T
    v_hat, s, u_hat = complex_svd_truncated(r, plan.output_rank())
    return basis @ u_hat, s, co @ v_hat


def rand_svd_passes(x, plan: SketchPlan):
    """Randomized SVD within a budget of ``plan.passes`` passes; returns ``(U, s, V)``.

    For ``v == 1`` the right factor is built on the raw Gaussian block and is
    not orthonormal.
    """
    if plan.passes is None:
        raise PlanError("arbitrary-pass scheme needs passes (v)")
    x = _check_matrix(x, plan)
    q1 = gaussian_matrix(x.shape[1], plan.width, plan.seed)
    q2 = r1 = r2 = None
    for i in range(1, plan.passes + 1):
        if i % 2:
            q2, r2 = complex_qr(x @ q1)
        else:
            q1, r1 = complex_qr(x.T @ q2)
    k = plan.output_rank()
    if plan.passes % 2 == 0:
        v_hat, s, u_hat = complex_svd_truncated(r1, k)
    else:
        u_hat, s, v_hat = complex_svd_truncated(r2, k)
    return q2 @ u_hat, s, q1 @ v_hat


# -- tensors -----------------------------------------------------------------

def _prepare(x, plan: SketchPlan) -> tuple[PassCountedSource, Tensor3]:
    src = _as_source(x)
    n1, n2, n3 = src.dims
    plan.check_target(n1, n2)
    return src, gaussian_random_tensor(n2, plan.width, n3, plan.seed, plan.random_mode)


def rand_tsvd_subspace(x, plan: SketchPlan) -> TsvdFactors:
    """Randomized t-SVD by subspace iteration; exactly ``2q + 2`` passes."""
    if plan.power is None:
        raise PlanError("subspace iteration needs power (q)")
    src, omega = _prepare(x, plan)
    basis = t_qr(src.apply(omega)).Q
    for _ in range(plan.power):
        co = t_qr(src.apply_adjoint(basis)).Q
        basis = t_qr(src.apply(co)).Q
    last = t_qr(src.apply_adjoint(basis))
    small = truncated_tsvd(last.R, plan.output_rank())
    # small.U spans the co-range side, small.V the range side
    return TsvdFactors(tprod(basis, small.V), small.S, tprod(last.Q, small.U), small.spectral_values)


def rand_tsvd_passes(x, plan: SketchPlan) -> TsvdFactors:
    """Pass-efficient randomized t-SVD using exactly ``plan.passes`` passes.

    Odd steps orthogonalize ``X * Q1`` (column space), even steps
    ``X^T * Q2`` (row space). The small triangular factor of the last step
    is factorized by a truncated t-SVD and lifted back through the bases.
    """
    if plan.passes is None:
        raise PlanError("arbitrary-pass scheme needs passes (v)")
    src, q1 = _prepare(x, plan)
    q2 = r1 = r2 = None
    for i in range(1, plan.passes + 1):
        if i % 2:
            q2, r2 = _split(t_qr(src.apply(q1)))
        else:
            q1, r1 = _split(t_qr(src.apply_adjoint(q2)))
    k = plan.output_rank()
    if plan.passes % 2 == 0:
        small = truncated_tsvd(r1, k)
        v_hat, u_hat = small.U, small.V
    else:
        small = truncated_tsvd(r2, k)
        u_hat, v_hat = small.U, small.V
    return TsvdFactors(tprod(q2, u_hat), small.S, tprod(q1, v_hat), small.spectral_values)


def _split(f):
    return f.Q, f.R


def run_plan(x, plan: SketchPlan) -> TsvdFactors:
    """Dispatch on whichever of ``passes`` / ``power`` the plan carries."""
    if plan.passes is not None:
        return rand_tsvd_passes(x, plan)
    return rand_tsvd_subspace(x, plan)


def derive_seed(master: int, index: int) -> int:
    """Independent per-trial seed, a deterministic function of ``(master, index)``."""
    return int(np.random.SeedSequence([master, index]).generate_state(1, dtype=np.uint64)[0])


__all__ = [
    "SketchPlan", "PassCountedSource", "passes_used", "gaussian_random_tensor",
    "gaussian_matrix", "rand_svd_subspace", "rand_svd_passes", "rand_tsvd_subspace",
    "rand_tsvd_passes", "run_plan", "derive_seed", "RANDOM_MODES",
]
