"""Independent reference implementations used to check the library.

Nothing here calls numpy's FFT or LAPACK-backed routines: the DFT is a
direct double sum, the t-product goes through explicit block-circulant
matrices built with Python loops, and singular values come from a cyclic
Jacobi eigen-solver applied to the Gram matrix.
"""

import cmath
import math

import numpy as np


def naive_dft(v):
    """O(n^2) DFT, ``X[k] = sum_t v[t] exp(-2 pi i k t / n)``."""
    n = len(v)
    return np.array([sum(v[t] * cmath.exp(-2j * math.pi * k * t / n) for t in range(n))
                     for k in range(n)])


def naive_dft_tubes(a):
    """Apply :func:`naive_dft` to every tube of a 3-way array."""
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i, j, :] = naive_dft(a[i, j, :])
    return out


def block_circulant(a):
    """``(n1 n3) x (n2 n3)`` matrix whose block (r, c) is frontal slice ``(r - c) mod n3``."""
    n1, n2, n3 = a.shape
    m = np.zeros((n1 * n3, n2 * n3))
    for r in range(n3):
        for c in range(n3):
            m[r * n1:(r + 1) * n1, c * n2:(c + 1) * n2] = a[:, :, (r - c) % n3]
    return m


def circulant_tprod(a, b):
    """t-product via ``circ(A) @ unfold(B)`` folded back, with explicit loops."""
    n1, _, n3 = a.shape
    n4 = b.shape[1]
    unfolded = np.concatenate([b[:, :, k] for k in range(n3)], axis=0)
    prod = block_circulant(a) @ unfolded
    out = np.empty((n1, n4, n3))
    for k in range(n3):
        out[:, :, k] = prod[k * n1:(k + 1) * n1, :]
    return out


def loop_tprod(a, b):
    """t-product as the circular convolution ``C_k = sum_j A_j B_{(k - j) mod n3}``."""
    n1, n2, n3 = a.shape
    n4 = b.shape[1]
    out = np.zeros((n1, n4, n3))
    for k in range(n3):
        for j in range(n3):
            for i in range(n1):
                for l in range(n4):
                    out[i, l, k] += sum(a[i, p, j] * b[p, l, (k - j) % n3] for p in range(n2))
    return out


def jacobi_eigvalsh(h, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations."""
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol * max(1.0, float(np.max(np.abs(np.diag(a))))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # rotate in the (p, q) plane so that a[p, q] vanishes
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * math.atan2(2 * abs(apq), aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[q, q] = c
                g[p, q] = s * phase
                g[q, p] = -s * np.conj(phase)
                a = g.conj().T @ a @ g
    return np.sort(np.diag(a).real)[::-1]


def gram_singular_values(a):
    """Singular values of ``a`` as square roots of the Jacobi eigenvalues of ``a^H a``."""
    a = np.asarray(a, dtype=complex)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    ev = jacobi_eigvalsh(a.conj().T @ a)
    return np.sqrt(np.clip(ev, 0.0, None))
