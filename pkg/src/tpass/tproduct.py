"""The t-product and its algebra: transpose, identity, predicates."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .fourier import SpectralTensor, fft_tubes, ifft_tubes
from .tensor import Tensor3, fro_norm


def _check_conformal(x: Tensor3, y: Tensor3) -> None:
    (_, a2, a3), (b1, _, b3) = x.dims, y.dims
    if a2 != b1 or a3 != b3:
        raise DimensionMismatch(f"cannot t-multiply {x.dims} by {y.dims}")


def spectral_matmul(xh: SpectralTensor, yh: SpectralTensor) -> SpectralTensor:
    """Slice-wise products over the stored half of two spectra."""
    return SpectralTensor(np.einsum("ijk,jlk->ilk", xh.half, yh.half), xh.n3)


def tprod(x: Tensor3, y: Tensor3) -> Tensor3:
    """``x * y`` for ``x`` of shape ``I1 x I2 x I3`` and ``y`` of shape ``I2 x I4 x I3``.

    Only the ``I3 // 2 + 1`` non-redundant spectral slices are multiplied;
    the rest follow from conjugate symmetry.
    """
    _check_conformal(x, y)
    return ifft_tubes(spectral_matmul(fft_tubes(x), fft_tubes(y)))


def circ(x: Tensor3) -> np.ndarray:
    """Block-circulant ``(I1 I3) x (I2 I3)`` matrix; block ``(a, b)`` is slice ``(a - b) mod I3``."""
    n1, n2, n3 = x.dims
    out = np.empty((n1 * n3, n2 * n3))
    for a in range(n3):
        for b in range(n3):
            out[a * n1:(a + 1) * n1, b * n2:(b + 1) * n2] = x.data[:, :, (a - b) % n3]
    return out


def unfold(y: Tensor3) -> np.ndarray:
    """Frontal slices stacked vertically."""
    n1, n2, n3 = y.dims
    return np.concatenate([y.data[:, :, k] for k in range(n3)], axis=0)


def fold(m: np.ndarray, n1: int, n3: int) -> Tensor3:
    return Tensor3(np.stack([m[k * n1:(k + 1) * n1, :] for k in range(n3)], axis=2))


def tprod_oracle(x: Tensor3, y: Tensor3) -> Tensor3:
    """Reference t-product through the explicit block-circulant matrix. Slow."""
    _check_conformal(x, y)
    return fold(circ(x) @ unfold(y), x.dims[0], x.dims[2])


def ttranspose(x: Tensor3) -> Tensor3:
    """Transpose every frontal slice, then reverse the order of slices 2..I3."""
    n3 = x.dims[2]
    order = (-np.arange(n3)) % n3
    return Tensor3._wrap(np.ascontiguousarray(x.data.transpose(1, 0, 2)[:, :, order]))


def identity_tensor(n: int, n3: int) -> Tensor3:
    if n < 1 or n3 < 1:
        raise ValueError("identity tensor needs n >= 1 and I3 >= 1")
    d = np.zeros((n, n, n3))
    d[:, :, 0] = np.eye(n)
    return Tensor3._wrap(d)


def is_orthogonal(q: Tensor3, tol: float = 1e-8) -> bool:
    """``||Q^T * Q - I||_F <= tol``; square tensors must also satisfy ``Q * Q^T = I``.

    Tall tensors (``I1 > I2``) are only checked one-sidedly, which is the
    property ``orth`` delivers.
    """
    n1, n2, n3 = q.dims
    qt = ttranspose(q)
    if fro_norm(tprod(qt, q) - identity_tensor(n2, n3)) > tol:
        return False
    if n1 == n2:
        return fro_norm(tprod(q, qt) - identity_tensor(n1, n3)) <= tol
    return True


def is_f_diagonal(s: Tensor3, tol: float = 1e-8) -> bool:
    n1, n2, _ = s.dims
    off = ~np.eye(n1, n2, dtype=bool)
    return bool(np.all(np.abs(s.data[off, :]) <= tol))
