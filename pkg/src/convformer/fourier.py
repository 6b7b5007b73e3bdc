"""Discrete Fourier transforms at arbitrary lengths and fast convolution.

Conventions: the forward transform is unnormalized,
``X_k = sum_l x_l exp(-2 pi i l k / L)``, and the inverse carries the 1/L
factor.  ``dft_naive``/``idft`` are the O(L^2) oracles; ``fft``/``ifft``
are the O(L log L) paths (iterative radix-2 for powers of two, Bluestein
chirp-z otherwise) and must agree with the oracles to tight tolerance.

All fast transforms operate along the last axis, so stacks of independent
signals (e.g. one per embedding channel) transform in one call.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

# imaginary magnitude above this after a real*real convolution means the
# transform itself is broken, not the data
RESIDUE_BOUND = 1e-9


class ResidueError(RuntimeError):
    """Imaginary residue of a real convolution exceeded RESIDUE_BOUND."""


def _check_finite(x: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite values in {what}")


def dft_naive(x) -> np.ndarray:
    """O(L^2) double-loop transform; the oracle for every fast path."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError("dft_naive expects a 1-D signal")
    _check_finite(x, "dft_naive input")
    n = x.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for l in range(n):
            acc += complex(x[l]) * cmath.exp(-2j * math.pi * l * k / n)
        out[k] = acc
    return out


def idft(x) -> np.ndarray:
    """O(L^2) inverse with the 1/L factor."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ValueError("idft expects a 1-D spectrum")
    n = x.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for l in range(n):
        acc = 0j
        for k in range(n):
            acc += complex(x[k]) * cmath.exp(2j * math.pi * l * k / n)
        out[l] = acc / n
    return out


@lru_cache(maxsize=64)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.intp)
    for i in range(n):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        rev[i] = r
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int) -> np.ndarray:
    tw = np.exp(-2j * np.pi * np.arange(size // 2) / size)
    tw.setflags(write=False)
    return tw


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if n == 1:
        return x.copy()
    lead = x.shape[:-1]
    y = x[..., _bitrev(n)]
    size = 2
    while size <= n:
        half = size // 2
        tw = _twiddles(size)
        y = y.reshape(lead + (n // size, size))
        even = y[..., :half]
        odd = y[..., half:] * tw
        y = np.concatenate([even + odd, even - odd], axis=-1)
        size *= 2
    return y.reshape(lead + (n,))


@lru_cache(maxsize=64)
def _bluestein_tables(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Chirp and the padded transform of its mirrored conjugate."""
    m = 1 << (2 * n - 1).bit_length()
    k = np.arange(n)
    chirp = np.exp(-1j * np.pi * (k * k % (2 * n)) / n)
    b = np.zeros(m, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    if n > 1:
        b[m - (n - 1):] = np.conj(chirp)[1:][::-1]
    bf = _fft_pow2(b)
    chirp.setflags(write=False)
    bf.setflags(write=False)
    return chirp, bf, m


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    chirp, bf, m = _bluestein_tables(n)
    a = np.zeros(x.shape[:-1] + (m,), dtype=np.complex128)
    a[..., :n] = x * chirp
    conv = _fft_pow2(np.conj(_fft_pow2(a) * bf))
    conv = np.conj(conv) / m
    return conv[..., :n] * chirp


def fft(x) -> np.ndarray:
    """Exact-length transform along the last axis, O(L log L)."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n < 1:
        raise ValueError("empty signal")
    if (n & (n - 1)) == 0:
        return _fft_pow2(x)
    return _fft_bluestein(x)


def ifft(x) -> np.ndarray:
    """Fast inverse along the last axis; carries the 1/L factor."""
    x = np.asarray(x, dtype=np.complex128)
    return np.conj(fft(np.conj(x))) / x.shape[-1]


def _residue_real(y: np.ndarray) -> np.ndarray:
    resid = np.abs(y.imag).max() if y.size else 0.0
    if resid > RESIDUE_BOUND:
        raise ResidueError(
            f"imaginary residue {resid:.3e} exceeds {RESIDUE_BOUND:.0e}"
        )
    return np.ascontiguousarray(y.real)


def circular_conv_fft(x, c) -> np.ndarray:
    """Length-preserving circular convolution via the spectral product.

    ``y_l = sum_j c_j x_{(l-j) mod L}``; both inputs must already have the
    same last-axis length (extend the kernel with zeros beforehand).
    Broadcasting across leading axes follows numpy rules.
    """
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if x.shape[-1] != c.shape[-1]:
        raise ValueError(
            f"length mismatch: signal {x.shape[-1]} vs kernel {c.shape[-1]}"
        )
    _check_finite(x, "signal")
    _check_finite(c, "kernel")
    return _residue_real(ifft(fft(x) * fft(c)))


def linear_conv_fft(x, c) -> np.ndarray:
    """Causal convolution ``y_l = sum_j c_j x_{l-j}`` (x_{<0} = 0).

    Computed by zero-extending both inputs to the next power of two at
    least L+K-1, circular-convolving there, and truncating back to L.
    """
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = x.shape[-1]
    k = c.shape[-1]
    if k > n:
        raise ValueError(f"kernel length {k} exceeds signal length {n}")
    _check_finite(x, "signal")
    _check_finite(c, "kernel")
    m = 1 << (n + k - 1).bit_length() if (n + k - 1) & (n + k - 2) else n + k - 1
    m = max(m, 1)
    xp = np.zeros(x.shape[:-1] + (m,), dtype=np.float64)
    xp[..., :n] = x
    cp = np.zeros(c.shape[:-1] + (m,), dtype=np.float64)
    cp[..., :k] = c
    y = _residue_real(ifft(fft(xp) * fft(cp)))
    return y[..., :n]


def circular_corr_fft(g, c) -> np.ndarray:
    """Circular cross-correlation ``r_m = sum_j c_j g_{(m+j) mod L}``.

    This is the adjoint of circular convolution by ``c`` and is what the
    accelerated backward pass needs for both input and kernel gradients.
    """
    g = np.asarray(g, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if g.shape[-1] != c.shape[-1]:
        raise ValueError(
            f"length mismatch: {g.shape[-1]} vs {c.shape[-1]}"
        )
    return _residue_real(ifft(fft(g) * np.conj(fft(c))))
