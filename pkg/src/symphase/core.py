"""Circular algebra on C^n: unitary DFT, time reversal, shifts, convolutions.

The DFT follows the positive-exponent, unitary convention

    (F v)_k = n^{-1/2} sum_l v_l exp(+2j pi k l / n),

so that ``dft(dft(v)) == time_reverse(v)`` and the fourth power is the
identity.  ``idft`` is the adjoint (negative exponent, same scaling).

Every fast (FFT) routine has an O(n^2) ``direct_*`` counterpart written as
the literal modular sum; the test-suite uses those as oracles.
"""

import numpy as np

__all__ = [
    "as_vector",
    "dft",
    "idft",
    "direct_dft",
    "direct_idft",
    "time_reverse",
    "conj_reverse",
    "cyclic_shift",
    "circ_conv",
    "circ_corr",
    "direct_circ_conv",
    "direct_circ_corr",
    "linear_conv",
    "linear_conv_matrix",
    "support",
    "is_k_sparse",
]


def as_vector(v, name="v"):
    """Return ``v`` as a 1-D complex128 array, rejecting empty or non-finite input."""
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} must have length >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def _pair(x, y):
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} != {y.size}")
    return x, y


def dft(v):
    """Unitary DFT with kernel ``n^{-1/2} exp(+2j pi k l / n)``.

    Any length is accepted; numpy's FFT handles non-power-of-two sizes.
    """
    return np.fft.ifft(as_vector(v), norm="ortho")


def idft(s):
    """Inverse of :func:`dft` (kernel ``n^{-1/2} exp(-2j pi k l / n)``)."""
    return np.fft.fft(as_vector(s, "s"), norm="ortho")


def _dft_matrix(n, sign):
    k = np.arange(n)
    # reduce k*l modulo n before scaling so large products keep full accuracy
    phase = (np.outer(k, k) % n) * (2.0 * np.pi / n)
    return np.exp(sign * 1j * phase) / np.sqrt(n)


def direct_dft(v):
    """O(n^2) matrix-vector evaluation of :func:`dft`."""
    v = as_vector(v)
    return _dft_matrix(v.size, +1) @ v


def direct_idft(s):
    """O(n^2) matrix-vector evaluation of :func:`idft`."""
    s = as_vector(s, "s")
    return _dft_matrix(s.size, -1) @ s


def time_reverse(v):
    """``(v_0, v_{n-1}, ..., v_1)``: index negation modulo n."""
    v = as_vector(v)
    return np.roll(v[::-1], 1)


def conj_reverse(v):
    """``time_reverse(conj(v))``; conjugate-symmetric vectors are its fixed points."""
    return time_reverse(np.conj(as_vector(v)))


def cyclic_shift(v, i):
    """Apply the i-th power of the unit shift: ``out[k] = v[(k - i) mod n]``."""
    v = as_vector(v)
    return np.roll(v, int(i) % v.size)


def circ_conv(x, y):
    """Circular convolution ``sqrt(n) F^*(F x * F y)``."""
    x, y = _pair(x, y)
    return np.sqrt(x.size) * idft(dft(x) * dft(y))


def circ_corr(x, y):
    """Circular correlation ``x (*) time_reverse(conj(y))``.

    Its DFT at ``y = x`` is ``sqrt(n) |dft(x)|**2``.
    """
    x, y = _pair(x, y)
    return circ_conv(x, conj_reverse(y))


def direct_circ_conv(x, y):
    """Definitional sum ``out[k] = sum_l x[l] y[(k - l) mod n]``."""
    x, y = _pair(x, y)
    n = x.size
    k = np.arange(n)
    idx = (k[:, None] - k[None, :]) % n
    return (y[idx] * x[None, :]).sum(axis=1)


def direct_circ_corr(x, y):
    """Definitional sum ``out[k] = sum_l x[l] conj(y[(l - k) mod n])``."""
    x, y = _pair(x, y)
    n = x.size
    k = np.arange(n)
    idx = (k[None, :] - k[:, None]) % n
    return (np.conj(y)[idx] * x[None, :]).sum(axis=1)


def linear_conv(x, y):
    """Ordinary (non-cyclic) convolution, length ``len(x) + len(y) - 1``."""
    return np.convolve(as_vector(x, "x"), as_vector(y, "y"))


def linear_conv_matrix(x, f):
    """Banded Toeplitz matrix ``T`` with ``T @ y == linear_conv(x, y)`` for ``y`` in C^f.

    Column ``j`` holds ``x`` shifted down by ``j`` rows.
    """
    x = as_vector(x, "x")
    f = int(f)
    if f < 1:
        raise ValueError("f must be >= 1")
    T = np.zeros((x.size + f - 1, f), dtype=np.complex128)
    for j in range(f):
        T[j:j + x.size, j] = x
    return T


def support(v, tol=None):
    """Indices with ``|v_i| > tol``; ``tol`` defaults to ``1e-12 * max|v|``."""
    v = as_vector(v)
    if tol is None:
        tol = 1e-12 * np.max(np.abs(v))
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return set(np.flatnonzero(np.abs(v) > tol).tolist())


def is_k_sparse(v, k, tol=None):
    return len(support(v, tol)) <= k
