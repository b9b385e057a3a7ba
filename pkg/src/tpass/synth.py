"""Synthetic test tensors with known tubal structure."""

from __future__ import annotations

from typing import Literal

import numpy as np

from .errors import RankError
from .fourier import SpectralTensor, half_length, ifft_tubes
from .tensor import Tensor3
from .tproduct import tprod

Spectrum = Literal["exact", "poly", "exp"]


def decay_values(r: int, spectrum: Spectrum, rate: float) -> np.ndarray:
    """``j^-rate`` (poly) or ``exp(-rate (j - 1))`` (exp) for ``j = 1..r``."""
    j = np.arange(1, r + 1, dtype=np.float64)
    if spectrum == "poly":
        return j ** -rate
    if spectrum == "exp":
        return np.exp(-rate * (j - 1))
    raise ValueError(f"no decay law for spectrum {spectrum!r}")


def _orthonormal(rng: np.random.Generator, n: int, k: int, real: bool) -> np.ndarray:
    g = rng.standard_normal((n, k))
    if not real:
        g = g + 1j * rng.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diagonal(r).real)[None, :]


def from_spectral_values(n1: int, n2: int, n3: int, values, seed: int = 0) -> Tensor3:
    """Real tensor whose every Fourier slice has singular values ``values``.

    ``values`` is either one vector (shared by all slices) or an array of
    shape ``(I3 // 2 + 1, k)``, one row per stored slice. Singular vectors are
    Haar-random; the self-conjugate slices get real ones.
    """
    h = half_length(n3)
    vals = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if vals.shape[0] == 1:
        vals = np.repeat(vals, h, axis=0)
    k = vals.shape[1]
    if vals.shape[0] != h or k > min(n1, n2):
        raise RankError(f"cannot place {vals.shape} singular values in a {n1}x{n2}x{n3} tensor")
    rng = np.random.Generator(np.random.PCG64(seed))
    half = np.empty((n1, n2, h), dtype=np.complex128)
    for s in range(h):
        real = s == 0 or (n3 % 2 == 0 and s == n3 // 2)
        u = _orthonormal(rng, n1, k, real)
        v = _orthonormal(rng, n2, k, real)
        half[:, :, s] = (u * vals[s][None, :]) @ np.conj(v).T
    return ifft_tubes(SpectralTensor(half, n3))


def synth_lowrank(n1: int, n2: int, n3: int, r: int, spectrum: Spectrum = "exact",
                  rate: float = 1.0, seed: int = 0) -> Tensor3:
    """Synthetic tensor of tubal rank ``r``.

    ``exact``: ``A * B`` with Gaussian ``A`` (``I1 x r x I3``) and ``B``
    (``r x I2 x I3``). ``poly`` / ``exp``: every Fourier slice carries the
    singular values of :func:`decay_values`.
    """
    if not 1 <= r <= min(n1, n2):
        raise RankError(f"rank {r} outside 1..{min(n1, n2)}")
    if spectrum == "exact":
        rng = np.random.Generator(np.random.PCG64(seed))
        a = rng.standard_normal(n1 * r * n3).reshape((n1, r, n3), order="F")
        b = rng.standard_normal(r * n2 * n3).reshape((r, n2, n3), order="F")
        return tprod(Tensor3._wrap(a), Tensor3._wrap(b))
    return from_spectral_values(n1, n2, n3, decay_values(r, spectrum, rate), seed)


def synth_image(n1: int = 64, n2: int = 64, layers: int = 10, channels: int = 3,
                seed: int = 0) -> Tensor3:
    """Smooth synthetic colour image in [0, 1] of tubal rank ``layers``.

    The image is a sum of ``layers`` separable non-negative cosine patterns,
    each mixed into the channels with its own positive weights (decaying as
    ``1/k``), then scaled so its maximum is 1.
    """
    if not 1 <= layers <= min(n1, n2):
        raise RankError(f"layer count {layers} outside 1..{min(n1, n2)}")
    rng = np.random.Generator(np.random.PCG64(seed))

    def profiles(n):
        t = np.linspace(0.0, 1.0, n)
        return np.stack([1 + np.cos(np.pi * (k // 2 + 1) * t + rng.uniform(0, 2 * np.pi))
                         for k in range(layers)], axis=1) / 2

    g, h = profiles(n1), profiles(n2)
    w = rng.uniform(0.2, 1.0, (layers, channels)) / np.arange(1, layers + 1)[:, None]
    img = np.einsum("ik,jk,kc->ijc", g, h, w)
    return Tensor3(img / img.max())
