"""Transforms along the tubes (mode 3) of a real tensor.

Forward DFT is unnormalized and the inverse carries the ``1/I3`` factor.
A real tensor's spectrum is conjugate symmetric, so only the first
``H = ceil((I3 + 1) / 2) = I3 // 2 + 1`` frontal slices are stored; slice
``i > H`` (1-based) is ``conj`` of slice ``I3 - i + 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedSpectrum
from .tensor import Tensor3

SYMMETRY_TOL = 1e-8


def half_length(n3: int) -> int:
    return n3 // 2 + 1


@dataclass(frozen=True)
class SpectralTensor:
    """Half-stored mode-3 spectrum.

    ``half`` has shape ``(I1, I2, H)``; ``n3`` is the full tube length.
    """

    half: np.ndarray
    n3: int
    real_origin: bool = True

    def __post_init__(self):
        if self.half.ndim != 3 or self.half.shape[2] != half_length(self.n3):
            raise MalformedSpectrum(
                f"half spectrum of shape {self.half.shape} does not match tube length {self.n3}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.half.shape[0], self.half.shape[1], self.n3)

    @property
    def n_stored(self) -> int:
        return self.half.shape[2]

    def stored_slice(self, i: int) -> np.ndarray:
        """Stored slice by 0-based position (``0 <= i < H``)."""
        return self.half[:, :, i]

    def full(self) -> np.ndarray:
        """Materialize all ``I3`` complex slices."""
        h = self.n_stored
        mirror = np.conj(self.half[:, :, 1:self.n3 - h + 1][:, :, ::-1])
        return np.concatenate([self.half, mirror], axis=2)

    @classmethod
    def from_full(cls, full: np.ndarray) -> "SpectralTensor":
        n3 = full.shape[2]
        return cls(np.ascontiguousarray(full[:, :, :half_length(n3)]), n3)

    @classmethod
    def from_slices(cls, slices, n3: int) -> "SpectralTensor":
        """Stack the ``H`` stored slices (each ``I1 x I2``) into a spectrum."""
        return cls(np.stack(list(slices), axis=2), n3)


def fft_tubes(x: Tensor3) -> SpectralTensor:
    return SpectralTensor(np.fft.rfft(x.data, axis=2), x.dims[2])


def reconstruct_full_slice(xh: SpectralTensor, i: int) -> np.ndarray:
    """Full spectral slice ``i`` (1-based), using the conjugate mirror past ``H``."""
    n3 = xh.n3
    if not 1 <= i <= n3:
        raise IndexError(f"slice index {i} outside 1..{n3}")
    if i <= xh.n_stored:
        return xh.half[:, :, i - 1]
    return np.conj(xh.half[:, :, n3 - i + 1])


def check_symmetry(xh: SpectralTensor, tol: float = SYMMETRY_TOL) -> None:
    """The self-conjugate slices (DC, and Nyquist for even ``I3``) must be real."""
    scale = max(1.0, float(np.max(np.abs(xh.half))) if xh.half.size else 1.0)
    selfconj = [0] + ([xh.n3 // 2] if xh.n3 % 2 == 0 and xh.n3 > 1 else [])
    worst = max(float(np.max(np.abs(xh.half[:, :, k].imag), initial=0.0)) for k in selfconj)
    if worst > tol * scale:
        raise MalformedSpectrum(
            f"self-conjugate slice has imaginary part {worst:.3e} (limit {tol * scale:.3e})")


def ifft_tubes(xh: SpectralTensor, tol: float = SYMMETRY_TOL) -> Tensor3:
    """Inverse transform back to a real tensor; the residual imaginary part is dropped."""
    check_symmetry(xh, tol)
    return Tensor3._wrap(np.fft.irfft(xh.half, n=xh.n3, axis=2))
