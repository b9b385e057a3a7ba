import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_dft_tubes
from tpass.errors import MalformedSpectrum
from tpass.fourier import (SpectralTensor, check_symmetry, fft_tubes, half_length, ifft_tubes,
                           reconstruct_full_slice)
from tpass.tensor import Tensor3, fro_norm


def rand(shape, seed=0):
    return Tensor3(np.random.default_rng(seed).standard_normal(shape))


@pytest.mark.parametrize("n3,h", [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3), (16, 9)])
def test_half_length(n3, h):
    assert half_length(n3) == h


def test_length_one_is_identity():
    x = rand((3, 2, 1))
    np.testing.assert_array_equal(fft_tubes(x).half[:, :, 0], x.data[:, :, 0])
    assert ifft_tubes(fft_tubes(x)) == x


def test_constant_tube():
    x = Tensor3(np.full((1, 1, 6), 2.5))
    xh = fft_tubes(x).full()
    np.testing.assert_allclose(xh[0, 0], [15.0, 0, 0, 0, 0, 0], atol=1e-14)


@pytest.mark.parametrize("n3", [5, 6])
def test_against_naive_dft(n3):
    x = rand((2, 2, n3), 1)
    ref = naive_dft_tubes(x.data)
    assert np.max(np.abs(fft_tubes(x).full() - ref)) <= 1e-12


def test_round_trip():
    x = rand((3, 4, 7), 2)
    assert np.max(np.abs(ifft_tubes(fft_tubes(x)).data - x.data)) <= 1e-12


def test_dc_only_spectrum():
    half = np.zeros((1, 1, 3), dtype=complex)
    half[0, 0, 0] = 5 * 1.5
    x = ifft_tubes(SpectralTensor(half, 5))
    np.testing.assert_allclose(x.data[0, 0], np.full(5, 1.5), atol=1e-15)


def test_full_slice_dc_is_real():
    s = reconstruct_full_slice(fft_tubes(rand((3, 3, 6), 3)), 1)
    assert np.all(s.imag == 0)


def test_full_slice_mirrors_conjugate():
    x = rand((2, 3, 4), 4)
    xh = fft_tubes(x)
    ref = naive_dft_tubes(x.data)
    np.testing.assert_allclose(reconstruct_full_slice(xh, 4), np.conj(reconstruct_full_slice(xh, 2)))
    np.testing.assert_allclose(reconstruct_full_slice(xh, 4), ref[:, :, 3], atol=1e-12)


def test_full_slice_boundary_odd():
    xh = fft_tubes(rand((2, 2, 5), 5))
    np.testing.assert_array_equal(reconstruct_full_slice(xh, 3), xh.stored_slice(2))


def test_full_slice_bad_index():
    with pytest.raises(IndexError):
        reconstruct_full_slice(fft_tubes(rand((2, 2, 5))), 6)


@pytest.mark.parametrize("n3", [7, 8])
def test_conjugate_symmetry(n3):
    full = fft_tubes(rand((3, 2, n3), 6)).full()
    for i in range(half_length(n3) + 1, n3 + 1):
        np.testing.assert_allclose(full[:, :, i - 1], np.conj(full[:, :, n3 - i + 1]), atol=1e-13)


def test_malformed_dc_rejected():
    half = np.zeros((2, 2, 3), dtype=complex)
    half[0, 0, 0] = 1j
    with pytest.raises(MalformedSpectrum):
        check_symmetry(SpectralTensor(half, 4))
    with pytest.raises(MalformedSpectrum):
        ifft_tubes(SpectralTensor(half, 4))


def test_malformed_nyquist_rejected():
    half = np.zeros((2, 2, 3), dtype=complex)
    half[1, 0, 2] = 0.5j
    with pytest.raises(MalformedSpectrum):
        ifft_tubes(SpectralTensor(half, 4))
    # odd length has no Nyquist slice, so the same data is acceptable there
    ifft_tubes(SpectralTensor(half, 5))


def test_from_full_round_trip():
    x = rand((3, 3, 6), 7)
    xh = fft_tubes(x)
    again = SpectralTensor.from_full(xh.full())
    np.testing.assert_array_equal(again.half, xh.half)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 33), st.integers(0, 10**6))
def test_parseval(n1, n2, n3, seed):
    x = rand((n1, n2, n3), seed)
    full = fft_tubes(x).full()
    spectral = np.sum(np.abs(full) ** 2) / n3
    assert spectral == pytest.approx(fro_norm(x) ** 2, rel=1e-12)
