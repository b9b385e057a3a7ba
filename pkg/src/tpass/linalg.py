"""Dense QR/SVD kernels and their slice-wise lifts: t-QR (``orth``) and truncated t-SVD.

Kernels run in real arithmetic whenever a slice is exactly real (always
the case for the DC slice of a real tensor, and for every slice when
``I3 == 1``), so the matrix and tensor code paths agree bit for bit.

Normalizations, so factors are deterministic:

* QR: ``diag(R)`` is real and non-negative.
* SVD: the largest-magnitude entry of every left singular vector is real
  and positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankError
from .fourier import SpectralTensor, fft_tubes, ifft_tubes
from .tensor import Tensor3, relative_error
from .tproduct import tprod, ttranspose


def _maybe_real(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a) and not np.any(a.imag):
        return np.ascontiguousarray(a.real)
    return a


def complex_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Economy QR, ``a = q @ r`` with ``q`` of width ``min(m, n)``."""
    a = _maybe_real(np.asarray(a))
    q, r = np.linalg.qr(a, mode="reduced")
    d = np.diagonal(r).copy()
    mag = np.abs(d)
    phase = np.ones_like(d)
    nz = mag > 0
    phase[nz] = d[nz] / mag[nz]
    q = q * phase[None, :]
    r = np.conj(phase)[:, None] * r
    return q, r


def complex_svd_truncated(a: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Leading ``rank`` singular triplets ``(U, s, V)`` with ``a ~= U diag(s) V^H``.

    ``s`` is returned as a 1-D array, sorted descending.
    """
    a = _maybe_real(np.asarray(a))
    m, n = a.shape
    if not 1 <= rank <= min(m, n):
        raise RankError(f"rank {rank} outside 1..{min(m, n)} for a {m}x{n} matrix")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    u, s, v = u[:, :rank], s[:rank], np.conj(vh[:rank, :]).T
    rows = np.argmax(np.abs(u), axis=0)
    pivot = u[rows, np.arange(rank)]
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1), 1)
    u, v = u / phase[None, :], v / phase[None, :]
    u[rows, np.arange(rank)] = mag  # exactly real, free of rounding in the division
    return u, s, v


def _as_complex(blocks: list[np.ndarray]) -> np.ndarray:
    return np.stack([b.astype(np.complex128, copy=False) for b in blocks], axis=2)


@dataclass(frozen=True)
class TqrFactors:
    Q: Tensor3
    R: Tensor3


@dataclass(frozen=True)
class TsvdFactors:
    """``X ~= U * S * V^T``.

    ``spectral_values`` holds the singular values of every stored Fourier
    slice, shape ``(H, rank)``; the spectral diagonal of ``S``.
    """

    U: Tensor3
    S: Tensor3
    V: Tensor3
    spectral_values: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return self.S.dims[0]

    def reconstruct(self) -> Tensor3:
        return tprod(tprod(self.U, self.S), ttranspose(self.V))

    def truncate(self, rank: int) -> "TsvdFactors":
        """Keep the leading ``rank`` tubes."""
        if not 1 <= rank <= self.rank:
            raise RankError(f"cannot truncate rank-{self.rank} factors to {rank}")
        sv = None if self.spectral_values is None else self.spectral_values[:, :rank]
        return TsvdFactors(
            Tensor3._wrap(self.U.data[:, :rank, :].copy()),
            Tensor3._wrap(self.S.data[:rank, :rank, :].copy()),
            Tensor3._wrap(self.V.data[:, :rank, :].copy()),
            sv,
        )


def t_qr(x: Tensor3) -> TqrFactors:
    """t-QR: economy QR of every stored Fourier slice, then back-transform."""
    xh = fft_tubes(x)
    qs, rs = zip(*(complex_qr(xh.stored_slice(k)) for k in range(xh.n_stored)))
    q = ifft_tubes(SpectralTensor(_as_complex(list(qs)), xh.n3))
    r = ifft_tubes(SpectralTensor(_as_complex(list(rs)), xh.n3))
    return TqrFactors(q, r)


def orth(x: Tensor3) -> Tensor3:
    return t_qr(x).Q


def spectral_tsvd(xh: SpectralTensor, rank: int) -> TsvdFactors:
    """Truncated t-SVD of a tensor given by its half spectrum."""
    n1, n2, n3 = xh.dims
    if not 1 <= rank <= min(n1, n2):
        raise RankError(f"tubal rank {rank} outside 1..{min(n1, n2)} for dims {xh.dims}")
    us, ss, vs = [], [], []
    for k in range(xh.n_stored):
        u, s, v = complex_svd_truncated(xh.stored_slice(k), rank)
        us.append(u)
        ss.append(np.diag(s))
        vs.append(v)
    u = ifft_tubes(SpectralTensor(_as_complex(us), n3))
    s = ifft_tubes(SpectralTensor(_as_complex(ss), n3))
    v = ifft_tubes(SpectralTensor(_as_complex(vs), n3))
    return TsvdFactors(u, s, v, np.array([np.diag(d) for d in ss]))


def truncated_tsvd(x: Tensor3, rank: int) -> TsvdFactors:
    return spectral_tsvd(fft_tubes(x), rank)


def tsvd_error(x: Tensor3, factors: TsvdFactors) -> float:
    return relative_error(x, factors.reconstruct())
