"""Dense real third-order tensors, masks and the quality metrics.

Storage is an ``(I1, I2, I3)`` float64 array. The canonical linearization
(file formats, random fills) is mode-1 fastest, then mode-2, then mode-3,
which is numpy's Fortran order.

The named accessors (:meth:`Tensor3.frontal_slice`, :meth:`Tensor3.tube`,
:meth:`Tensor3.get`, :meth:`Tensor3.set`) take 1-based indices so that they
read like the pseudocode; ``Tensor3.data`` is a plain 0-based ndarray.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "Tensor3",
    "MaskTensor",
    "as_tensor",
    "fro_norm",
    "inf_norm",
    "hadamard",
    "mask_project",
    "relative_error",
    "psnr",
    "psnr_standard",
    "EXACT",
]


class _Exact(float):
    """Float ``inf`` that prints as ``EXACT``; returned by PSNR for identical inputs."""

    def __new__(cls):
        return super().__new__(cls, math.inf)

    def __repr__(self):
        return "EXACT"

    __str__ = __repr__


EXACT = _Exact()


def _check_index(i: int, n: int, what: str) -> int:
    if not 1 <= i <= n:
        raise IndexError(f"{what} index {i} outside 1..{n}")
    return i - 1


class Tensor3:
    """Immutable dense real tensor of shape ``(I1, I2, I3)``."""

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, copy=True)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"expected a non-empty third-order array, got shape {arr.shape}")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Tensor3":
        # trusted internal constructor: takes ownership without copying
        obj = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        arr.setflags(write=False)
        obj._data = arr
        return obj

    @classmethod
    def zeros(cls, dims) -> "Tensor3":
        return cls._wrap(np.zeros(tuple(dims)))

    @classmethod
    def ones(cls, dims) -> "Tensor3":
        return cls._wrap(np.ones(tuple(dims)))

    @classmethod
    def from_linear(cls, values: Iterable[float], dims) -> "Tensor3":
        """Build from a flat sequence in canonical (mode-1 fastest) order."""
        dims = tuple(int(d) for d in dims)
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != math.prod(dims):
            raise DimensionMismatch(f"{flat.size} values cannot fill dims {dims}")
        return cls._wrap(flat.reshape(dims, order="F").copy())

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._data.shape  # type: ignore[return-value]

    shape = dims

    def linear(self) -> np.ndarray:
        """Entries flattened in canonical order."""
        return self._data.ravel(order="F")

    def frontal_slice(self, i: int) -> np.ndarray:
        """``X(:,:,i)`` for 1-based ``i``."""
        return self._data[:, :, _check_index(i, self.dims[2], "slice")]

    def tube(self, i: int, j: int) -> np.ndarray:
        """``X(i,j,:)`` for 1-based ``i, j``."""
        return self._data[_check_index(i, self.dims[0], "row"), _check_index(j, self.dims[1], "column"), :]

    def get(self, i1: int, i2: int, i3: int) -> float:
        d = self.dims
        return float(self._data[_check_index(i1, d[0], "mode-1"), _check_index(i2, d[1], "mode-2"),
                                _check_index(i3, d[2], "mode-3")])

    def set(self, idx: tuple[int, int, int], value: float) -> "Tensor3":
        """Return a copy with the entry at 1-based ``idx`` replaced."""
        d = self.dims
        k = tuple(_check_index(i, n, "entry") for i, n in zip(idx, d))
        arr = self._data.copy()
        arr[k] = value
        return Tensor3._wrap(arr)

    def __add__(self, other):
        return Tensor3._wrap(self._data + _raw(other, self.dims))

    def __sub__(self, other):
        return Tensor3._wrap(self._data - _raw(other, self.dims))

    def __mul__(self, alpha):
        if isinstance(alpha, Tensor3):
            raise TypeError("use hadamard() or tprod() for tensor-tensor products")
        return Tensor3._wrap(self._data * float(alpha))

    __rmul__ = __mul__

    def __neg__(self):
        return Tensor3._wrap(-self._data)

    def __eq__(self, other):
        return isinstance(other, Tensor3) and self.dims == other.dims and np.array_equal(self._data, other._data)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"Tensor3(dims={self.dims})"


def _raw(other, dims) -> np.ndarray:
    if isinstance(other, Tensor3):
        if other.dims != dims:
            raise DimensionMismatch(f"dims {other.dims} != {dims}")
        return other.data
    return np.asarray(other, dtype=np.float64)


def as_tensor(x) -> Tensor3:
    return x if isinstance(x, Tensor3) else Tensor3(x)


class MaskTensor:
    """Boolean indicator of observed entries, same layout as :class:`Tensor3`."""

    __slots__ = ("_flags",)

    def __init__(self, flags):
        arr = np.array(flags, dtype=bool, copy=True)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"expected a third-order mask, got shape {arr.shape}")
        arr.setflags(write=False)
        self._flags = arr

    @classmethod
    def from_tensor(cls, t: Tensor3) -> "MaskTensor":
        """Nonzero entries of ``t`` are observed (the 0/1 TNS3 encoding)."""
        return cls(t.data != 0)

    @classmethod
    def random(cls, dims, observed_fraction: float, seed: int) -> "MaskTensor":
        rng = np.random.Generator(np.random.PCG64(seed))
        u = rng.random(math.prod(dims)).reshape(tuple(dims), order="F")
        return cls(u < observed_fraction)

    @property
    def flags(self) -> np.ndarray:
        return self._flags

    @property
    def dims(self) -> tuple[int, int, int]:
        return self._flags.shape  # type: ignore[return-value]

    def complement(self) -> "MaskTensor":
        return MaskTensor(~self._flags)

    def count(self) -> int:
        return int(self._flags.sum())

    def to_tensor(self) -> Tensor3:
        return Tensor3._wrap(self._flags.astype(np.float64))

    def __repr__(self):
        return f"MaskTensor(dims={self.dims}, observed={self.count()})"


def _same_dims(a, b):
    if a.dims != b.dims:
        raise DimensionMismatch(f"dims {a.dims} and {b.dims} differ")


def fro_norm(x: Tensor3) -> float:
    return float(np.linalg.norm(x.data.ravel()))


def inf_norm(x: Tensor3) -> float:
    return float(np.max(np.abs(x.data)))


def hadamard(x: Tensor3, y: Tensor3) -> Tensor3:
    _same_dims(x, y)
    return Tensor3._wrap(x.data * y.data)


def mask_project(x: Tensor3, mask: MaskTensor) -> Tensor3:
    """Keep observed entries, set the rest to exactly zero."""
    _same_dims(x, mask)
    return Tensor3._wrap(np.where(mask.flags, x.data, 0.0))


def relative_error(x: Tensor3, approx: Tensor3) -> float:
    """``||x - approx||_F / ||x||_F``; ``x`` is the reference."""
    _same_dims(x, approx)
    ref = fro_norm(x)
    if ref == 0.0:
        raise ValueError("relative error undefined for a zero reference tensor")
    return float(np.linalg.norm((x.data - approx.data).ravel()) / ref)


def psnr(x: Tensor3, y: Tensor3) -> float:
    """PSNR in the unsquared form ``10 log10(||x||_inf / ||x - y||_F)``.

    ``x`` is the reference image. Identical inputs return :data:`EXACT`.
    """
    _same_dims(x, y)
    diff = float(np.linalg.norm((x.data - y.data).ravel()))
    if diff == 0.0:
        return EXACT
    return 10.0 * math.log10(inf_norm(x) / diff)


def psnr_standard(x: Tensor3, y: Tensor3) -> float:
    """Conventional PSNR: ``10 log10(peak^2 * N / ||x - y||_F^2)`` with peak ``||x||_inf``."""
    _same_dims(x, y)
    diff2 = float(np.sum((x.data - y.data) ** 2))
    if diff2 == 0.0:
        return EXACT
    n = x.data.size
    return 10.0 * math.log10(inf_norm(x) ** 2 * n / diff2)
