"""Token mixers: everything that fuses information across sequence positions.

All mixers map a representation sequence ``[.., L, D]`` to the same shape.
The depth-wise convolution (kernel ``[K, D]``, one 1-D kernel per channel)
is the main mixer; its spectral twin computes the identical map through
FFT-based convolution with FFT-based adjoints.  The attention family
covers the single-head baseline plus its ablation variants: trainable
fixed matrix, input-generated rows, frozen random matrix, per-step
(unshared) projections, flattened-input projections, no mixer at all,
full and separable temporal convolutions, and a shared L-by-L token MLP.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import fourier
from .autodiff import (
    Tape,
    Var,
    _split,
    accumulate,
    add,
    dropout,
    matmul,
    mul,
    reshape,
    scale,
    softmax_rows,
    transpose_last2,
)
from .rng import Rng

INIT_STD = 0.02


class MixerKind(str, enum.Enum):
    SA = "sa"
    SA_WINDOWED = "sa_windowed"
    SAR_O = "sar_o"
    SAR_P = "sar_p"
    SAR_R = "sar_r"
    SAR_N = "sar_n"
    SAR_NPLUS = "sar_nplus"
    SAR_W = "sar_w"
    DWC_DIRECT = "dwc_direct"
    DWC_FFT = "dwc_fft"
    CONV_V = "conv_v"
    CONV_S = "conv_s"
    MLP_MIXER = "mlp_mixer"


class Padding(str, enum.Enum):
    ZERO = "zero"
    CIRCULAR = "circular"
    REFLECT = "reflect"


_KERNEL_KINDS = {
    MixerKind.DWC_DIRECT,
    MixerKind.DWC_FFT,
    MixerKind.CONV_V,
    MixerKind.CONV_S,
}


@dataclass
class MixerSpec:
    """Which mixer to build and its hyperparameters."""

    kind: MixerKind = MixerKind.DWC_DIRECT
    kernel_size: int = 45
    window: Optional[int] = None
    padding: Padding = Padding.CIRCULAR
    causal: bool = True
    # reproduce the multiplicative (post-softmax) window form instead of
    # additive -inf masking
    multiplicative_window: bool = False
    # row-softmax fixed attention matrices before use
    normalize_fixed: bool = True

    def validate(self, max_len: int) -> None:
        if self.kind in _KERNEL_KINDS:
            if not 1 <= self.kernel_size <= max_len:
                raise ValueError(
                    f"kernel_size must be in [1, {max_len}], got {self.kernel_size}"
                )
        if self.kind is MixerKind.SA_WINDOWED:
            if self.window is None or self.window < 0:
                raise ValueError("windowed attention needs window >= 0")


# ---------------------------------------------------------------------------
# masks
# ---------------------------------------------------------------------------


def window_mask(length: int, width: int) -> np.ndarray:
    """Band mask: entry (i, j) is 1 iff |i - j| <= width."""
    if width < 0:
        raise ValueError(f"window width must be >= 0, got {width}")
    idx = np.arange(length)
    return (np.abs(idx[:, None] - idx[None, :]) <= width).astype(np.float64)


def causal_mask(length: int) -> np.ndarray:
    """Lower-triangular mask: position i may attend to j <= i."""
    return np.tril(np.ones((length, length)))


# ---------------------------------------------------------------------------
# depth-wise convolution (direct path)
# ---------------------------------------------------------------------------


def _pad_time(x: np.ndarray, padding: Padding, k: int) -> np.ndarray:
    """Prepend k-1 entries on the time axis (-2) per the padding mode."""
    if k == 1:
        return x
    if padding is Padding.ZERO:
        width = [(0, 0)] * (x.ndim - 2) + [(k - 1, 0), (0, 0)]
        return np.pad(x, width)
    if padding is Padding.CIRCULAR:
        return np.concatenate([x[..., x.shape[-2] - (k - 1):, :], x], axis=-2)
    if padding is Padding.REFLECT:
        width = [(0, 0)] * (x.ndim - 2) + [(k - 1, 0), (0, 0)]
        return np.pad(x, width, mode="reflect")
    raise ValueError(f"unknown padding {padding!r}")


def _windowed_terms(xp: np.ndarray, k: int) -> np.ndarray:
    """Sliding windows of the padded sequence: [.., L_out, D, k]."""
    return sliding_window_view(xp, k, axis=-2)


def _dwc_forward(x: np.ndarray, kernel: np.ndarray, padding: Padding) -> np.ndarray:
    k = kernel.shape[0]
    v = _windowed_terms(_pad_time(x, padding, k), k)
    return np.einsum("...ldk,kd->...ld", v, kernel[::-1])


def _fold_pad_grad(dxp: np.ndarray, padding: Padding, k: int, length: int) -> np.ndarray:
    """Fold gradient w.r.t. the padded sequence back onto the original."""
    if k == 1:
        return dxp
    dx = dxp[..., k - 1:, :].copy()
    if padding is Padding.CIRCULAR:
        dx[..., length - (k - 1):, :] += dxp[..., : k - 1, :]
    elif padding is Padding.REFLECT:
        # padded index i < k-1 read original index k-1-i
        for i in range(k - 1):
            dx[..., k - 1 - i, :] += dxp[..., i, :]
    return dx


def dwc_direct(
    R, C, padding: Padding = Padding.ZERO, causal: bool = True,
    tape: Optional[Tape] = None,
) -> Var:
    """Per-channel temporal convolution, O(L*K) per channel.

    ``y[l, d] = sum_j C[j, d] * R[l-j, d]`` with out-of-range indices
    resolved by the padding mode (ZERO treats them as 0, so output l
    depends only on inputs <= l; CIRCULAR wraps; REFLECT mirrors).
    ``causal=False`` flips the kernel direction so position l reads
    forward instead.
    """
    rd, rv = _split(R)
    cd, cv = _split(C)
    length = rd.shape[-2]
    k = cd.shape[0]
    if not 1 <= k <= length:
        raise ValueError(f"kernel size {k} out of range [1, {length}]")
    if cd.shape[-1] != rd.shape[-1]:
        raise ValueError(
            f"channel mismatch: kernel {cd.shape[-1]} vs input {rd.shape[-1]}"
        )
    x = rd if causal else rd[..., ::-1, :]
    y = _dwc_forward(x, cd, padding)
    out = Var(y if causal else y[..., ::-1, :])
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            go = g if causal else g[..., ::-1, :]
            if cv is not None:
                v = _windowed_terms(_pad_time(x, padding, k), k)
                lead = "abcefgh"[: go.ndim - 2]
                dcrev = np.einsum(f"{lead}ld,{lead}ldk->kd", go, v)
                accumulate(cv, dcrev[::-1].copy())
            if rv is not None:
                # d(padded input) is a causal zero-padded convolution of the
                # upstream gradient with the flipped kernel
                pad_r = [(0, 0)] * (go.ndim - 2) + [(0, k - 1), (0, 0)]
                gext = np.pad(go, pad_r)
                dxp = _dwc_forward(gext, cd[::-1], Padding.ZERO)
                dx = _fold_pad_grad(dxp, padding, k, length)
                accumulate(rv, dx if causal else dx[..., ::-1, :])

        tape.record(bwd, *(v for v in (rv, cv, out) if v is not None))
    return out


# ---------------------------------------------------------------------------
# depth-wise convolution (spectral path)
# ---------------------------------------------------------------------------


def _sum_leading(g: np.ndarray, ndim: int) -> np.ndarray:
    while g.ndim > ndim:
        g = g.sum(axis=0)
    return g


def dwc_fft(
    R, C, padding: Padding = Padding.CIRCULAR, tape: Optional[Tape] = None
) -> Var:
    """Spectral twin of :func:`dwc_direct`, O(L log L) per channel.

    CIRCULAR zero-extends the kernel to length L and multiplies spectra at
    length L; ZERO embeds the causal convolution in a circular one at the
    next power of two >= L+K-1.  REFLECT has no spectral shortcut and is
    rejected.  Gradients are computed with the adjoint (correlation)
    transforms, staying O(L log L).
    """
    if padding is Padding.REFLECT:
        raise ValueError("reflect padding has no spectral form; use dwc_direct")
    rd, rv = _split(R)
    cd, cv = _split(C)
    length = rd.shape[-2]
    k = cd.shape[0]
    if not 1 <= k <= length:
        raise ValueError(f"kernel size {k} out of range [1, {length}]")
    xt = np.swapaxes(rd, -1, -2)  # [.., D, L]
    ct = cd.T  # [D, K]
    if padding is Padding.CIRCULAR:
        cpad = np.zeros(ct.shape[:-1] + (length,))
        cpad[..., :k] = ct
        yt = fourier.circular_conv_fft(xt, cpad)
    else:
        yt = fourier.linear_conv_fft(xt, ct)
    out = Var(np.swapaxes(yt, -1, -2))
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            gt = np.swapaxes(g, -1, -2)
            if padding is Padding.CIRCULAR:
                cpad_b = np.zeros(ct.shape[:-1] + (length,))
                cpad_b[..., :k] = ct
                if rv is not None:
                    dxt = fourier.circular_corr_fft(gt, cpad_b)
                    accumulate(rv, np.swapaxes(dxt, -1, -2))
                if cv is not None:
                    dct = fourier.circular_corr_fft(gt, xt)
                    dct = _sum_leading(dct, 2)[..., :k]
                    accumulate(cv, dct.T.copy())
            else:
                m = length + k - 1
                if m & (m - 1):
                    m = 1 << m.bit_length()
                gp = np.zeros(gt.shape[:-1] + (m,))
                gp[..., :length] = gt
                if rv is not None:
                    cp = np.zeros(ct.shape[:-1] + (m,))
                    cp[..., :k] = ct
                    dxt = fourier.circular_corr_fft(gp, cp)[..., :length]
                    accumulate(rv, np.swapaxes(dxt, -1, -2))
                if cv is not None:
                    xp = np.zeros(xt.shape[:-1] + (m,))
                    xp[..., :length] = xt
                    dct = fourier.circular_corr_fft(gp, xp)
                    dct = _sum_leading(dct, 2)[..., :k]
                    accumulate(cv, dct.T.copy())

        tape.record(bwd, *(v for v in (rv, cv, out) if v is not None))
    return out


# ---------------------------------------------------------------------------
# full and separable temporal convolutions
# ---------------------------------------------------------------------------


def conv_full(
    R, C, padding: Padding = Padding.ZERO, causal: bool = True,
    tape: Optional[Tape] = None,
) -> Var:
    """Standard channel-mixing temporal convolution, kernel ``[K, D, D]``."""
    rd, rv = _split(R)
    cd, cv = _split(C)
    length = rd.shape[-2]
    k = cd.shape[0]
    if not 1 <= k <= length:
        raise ValueError(f"kernel size {k} out of range [1, {length}]")
    if cd.shape[1] != rd.shape[-1]:
        raise ValueError("input-channel mismatch")
    x = rd if causal else rd[..., ::-1, :]
    v = _windowed_terms(_pad_time(x, padding, k), k)  # [.., L, Din, k]
    y = np.einsum("...lik,kio->...lo", v, cd[::-1])
    out = Var(y if causal else y[..., ::-1, :])
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            go = g if causal else g[..., ::-1, :]
            if cv is not None:
                vb = _windowed_terms(_pad_time(x, padding, k), k)
                lead = "abcefgh"[: go.ndim - 2]
                dcrev = np.einsum(f"{lead}lik,{lead}lo->kio", vb, go)
                accumulate(cv, dcrev[::-1].copy())
            if rv is not None:
                pad_r = [(0, 0)] * (go.ndim - 2) + [(k - 1, k - 1), (0, 0)]
                gpp = np.pad(go, pad_r)
                w = _windowed_terms(gpp, k)  # [.., L+k-1, Dout, k]
                dxp = np.einsum("...lok,kio->...li", w, cd)
                dx = _fold_pad_grad(dxp, padding, k, length)
                accumulate(rv, dx if causal else dx[..., ::-1, :])

        tape.record(bwd, *(v for v in (rv, cv, out) if v is not None))
    return out


def conv_separable(
    R, C_depth, W_point, padding: Padding = Padding.ZERO, causal: bool = True,
    tape: Optional[Tape] = None,
) -> Var:
    """Depth-wise stage followed by a 1x1 channel-mixing stage."""
    h = dwc_direct(R, C_depth, padding=padding, causal=causal, tape=tape)
    return matmul(h, W_point, tape)


def mlp_mixer(R, W, tape: Optional[Tape] = None) -> Var:
    """Shared token-mixing matrix applied along the time axis: ``W @ R``."""
    wd, _ = _split(W)
    rd, _ = _split(R)
    if wd.shape[0] != wd.shape[1] or wd.shape[1] != rd.shape[-2]:
        raise ValueError(
            f"mixing matrix must be [{rd.shape[-2]}, {rd.shape[-2]}], got {wd.shape}"
        )
    return matmul(W, R, tape)


# ---------------------------------------------------------------------------
# attention family
# ---------------------------------------------------------------------------


def _attention_mask(
    length: int, causal: bool, window: Optional[int]
) -> Optional[np.ndarray]:
    mask = None
    if causal:
        mask = causal_mask(length)
    if window is not None:
        wm = window_mask(length, window)
        mask = wm if mask is None else mask * wm
    return mask


def _apply_attention(
    A: Var, R, w_v, b_v, attn_dropout: float, rng, training, tape
) -> Var:
    V = add(matmul(R, w_v, tape), b_v, tape)
    A = dropout(A, attn_dropout, rng, training, tape)
    return matmul(A, V, tape)


def self_attention(
    R,
    params: dict,
    causal: bool = True,
    window: Optional[int] = None,
    multiplicative_window: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Single-head scaled dot-product attention with optional masks.

    The causal mask hides j > i; the window mask hides |i - j| > window.
    Masks enter as -inf logits so rows stay normalized; with
    ``multiplicative_window`` the window is instead applied as an
    element-wise product after the softmax (rows then need not sum to 1).
    """
    rd, _ = _split(R)
    length, dim = rd.shape[-2], rd.shape[-1]
    q = add(matmul(R, params["w_q"], tape), params["b_q"], tape)
    k = add(matmul(R, params["w_k"], tape), params["b_k"], tape)
    logits = scale(matmul(q, transpose_last2(k, tape), tape), 1.0 / math.sqrt(dim), tape)
    if multiplicative_window and window is not None:
        pre_mask = _attention_mask(length, causal, None)
        A = softmax_rows(logits, mask=pre_mask, tape=tape)
        A = mul(A, window_mask(length, window), tape)
    else:
        A = softmax_rows(logits, mask=_attention_mask(length, causal, window), tape=tape)
    return _apply_attention(A, R, params["w_v"], params["b_v"], attn_dropout, rng, training, tape)


def fixed_matrix_attention(
    R,
    A_fixed,
    params: dict,
    normalize: bool = True,
    causal: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Input-independent attention matrix (trainable or frozen).

    With ``normalize`` the matrix is row-softmaxed (so its rows are
    stochastic like attention rows); otherwise it is used raw.
    """
    rd, _ = _split(R)
    length = rd.shape[-2]
    cmask = causal_mask(length) if causal else None
    if normalize:
        A = softmax_rows(A_fixed, mask=cmask, tape=tape)
    else:
        A = A_fixed if not isinstance(A_fixed, Var) else A_fixed
        if not isinstance(A, Var):
            A = Var(A)
        if cmask is not None:
            A = mul(A, cmask, tape)
    return _apply_attention(A, R, params["w_v"], params["b_v"], attn_dropout, rng, training, tape)


def personalized_attention(
    R,
    params: dict,
    causal: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Attention rows generated from each position's own representation.

    Row l is ``softmax(R_l @ W_p + b_p)`` with the projection shared by
    all time steps, so the matrix adapts to the input while remaining
    order-sensitive.
    """
    logits = add(matmul(R, params["w_p"], tape), params["b_p"], tape)
    rd, _ = _split(R)
    cmask = causal_mask(rd.shape[-2]) if causal else None
    A = softmax_rows(logits, mask=cmask, tape=tape)
    return _apply_attention(A, R, params["w_v"], params["b_v"], attn_dropout, rng, training, tape)


def per_step_linear(R, W_bank, b_bank, tape: Optional[Tape] = None) -> Var:
    """Position-specific affine maps: out[l] = R[l] @ W_bank[l] + b_bank[l]."""
    rd, rv = _split(R)
    wd, wv = _split(W_bank)
    bd, bv = _split(b_bank)
    lead = rd.shape[:-2]
    length, din = rd.shape[-2], rd.shape[-1]
    r3 = rd.reshape((-1, length, din))
    y = np.einsum("bld,lde->ble", r3, wd) + bd
    out = Var(y.reshape(lead + (length, wd.shape[-1])))
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            g3 = g.reshape((-1, length, wd.shape[-1]))
            if rv is not None:
                dr = np.einsum("ble,lde->bld", g3, wd)
                accumulate(rv, dr.reshape(rd.shape))
            if wv is not None:
                accumulate(wv, np.einsum("bld,ble->lde", r3, g3))
            if bv is not None:
                accumulate(bv, g3.sum(axis=0))

        tape.record(bwd, *(v for v in (rv, wv, bv, out) if v is not None))
    return out


def sar_n(
    R,
    params: dict,
    causal: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Attention with query/key projections unshared across time steps."""
    rd, _ = _split(R)
    dim = rd.shape[-1]
    q = per_step_linear(R, params["w_q_bank"], params["b_q_bank"], tape)
    k = per_step_linear(R, params["w_k_bank"], params["b_k_bank"], tape)
    logits = scale(matmul(q, transpose_last2(k, tape), tape), 1.0 / math.sqrt(dim), tape)
    mask = causal_mask(rd.shape[-2]) if causal else None
    A = softmax_rows(logits, mask=mask, tape=tape)
    return _apply_attention(A, R, params["w_v"], params["b_v"], attn_dropout, rng, training, tape)


def sar_nplus(
    R,
    params: dict,
    causal: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Attention with projections over the flattened whole sequence."""
    rd, _ = _split(R)
    lead = rd.shape[:-2]
    length, dim = rd.shape[-2], rd.shape[-1]
    flat = reshape(R, lead + (length * dim,), tape)
    if not lead:
        flat = reshape(flat, (1, length * dim), tape)
    q = add(matmul(flat, params["w_q_flat"], tape), params["b_q_flat"], tape)
    k = add(matmul(flat, params["w_k_flat"], tape), params["b_k_flat"], tape)
    q = reshape(q, lead + (length, dim), tape)
    k = reshape(k, lead + (length, dim), tape)
    logits = scale(matmul(q, transpose_last2(k, tape), tape), 1.0 / math.sqrt(dim), tape)
    mask = causal_mask(length) if causal else None
    A = softmax_rows(logits, mask=mask, tape=tape)
    return _apply_attention(A, R, params["w_v"], params["b_v"], attn_dropout, rng, training, tape)


def sar_w(R) -> Var:
    """No token mixer: the block reduces to its feed-forward path."""
    return R if isinstance(R, Var) else Var(R)


# ---------------------------------------------------------------------------
# parameter construction and dispatch
# ---------------------------------------------------------------------------


def init_mixer_params(
    spec: MixerSpec, max_len: int, hidden_dim: int, rng: Rng, prefix: str = ""
) -> tuple[dict[str, Var], set[str]]:
    """Fresh parameter tensors for one mixer; returns (params, frozen names).

    Weights are N(0, 0.02^2), biases zero.  The frozen set contains the
    names excluded from training (the random fixed attention matrix).
    """
    spec.validate(max_len)
    l_, d_, k_ = max_len, hidden_dim, spec.kernel_size

    def w(name, shape):
        return Var(rng.normal_array(shape, std=INIT_STD), name=prefix + name)

    def b(name, shape):
        return Var(np.zeros(shape), name=prefix + name)

    kind = spec.kind
    params: dict[str, Var] = {}
    frozen: set[str] = set()
    if kind in (MixerKind.SA, MixerKind.SA_WINDOWED):
        params = {
            "w_q": w("w_q", (d_, d_)), "b_q": b("b_q", d_),
            "w_k": w("w_k", (d_, d_)), "b_k": b("b_k", d_),
            "w_v": w("w_v", (d_, d_)), "b_v": b("b_v", d_),
        }
    elif kind in (MixerKind.SAR_O, MixerKind.SAR_R):
        params = {
            "a_matrix": w("a_matrix", (l_, l_)),
            "w_v": w("w_v", (d_, d_)), "b_v": b("b_v", d_),
        }
        if kind is MixerKind.SAR_R:
            frozen.add(params["a_matrix"].name)
    elif kind is MixerKind.SAR_P:
        params = {
            "w_p": w("w_p", (d_, l_)), "b_p": b("b_p", l_),
            "w_v": w("w_v", (d_, d_)), "b_v": b("b_v", d_),
        }
    elif kind is MixerKind.SAR_N:
        params = {
            "w_q_bank": w("w_q_bank", (l_, d_, d_)), "b_q_bank": b("b_q_bank", (l_, d_)),
            "w_k_bank": w("w_k_bank", (l_, d_, d_)), "b_k_bank": b("b_k_bank", (l_, d_)),
            "w_v": w("w_v", (d_, d_)), "b_v": b("b_v", d_),
        }
    elif kind is MixerKind.SAR_NPLUS:
        params = {
            "w_q_flat": w("w_q_flat", (l_ * d_, l_ * d_)), "b_q_flat": b("b_q_flat", l_ * d_),
            "w_k_flat": w("w_k_flat", (l_ * d_, l_ * d_)), "b_k_flat": b("b_k_flat", l_ * d_),
            "w_v": w("w_v", (d_, d_)), "b_v": b("b_v", d_),
        }
    elif kind is MixerKind.SAR_W:
        params = {}
    elif kind in (MixerKind.DWC_DIRECT, MixerKind.DWC_FFT):
        params = {"kernel": w("kernel", (k_, d_))}
    elif kind is MixerKind.CONV_V:
        params = {"kernel": w("kernel", (k_, d_, d_))}
    elif kind is MixerKind.CONV_S:
        params = {"kernel": w("kernel", (k_, d_)), "w_point": w("w_point", (d_, d_))}
    elif kind is MixerKind.MLP_MIXER:
        params = {"w_mix": w("w_mix", (l_, l_))}
    else:
        raise ValueError(f"unknown mixer kind {kind!r}")
    return params, frozen


def parameter_count(spec: MixerSpec, max_len: int, hidden_dim: int) -> int:
    params, _ = init_mixer_params(spec, max_len, hidden_dim, Rng(0))
    return sum(p.data.size for p in params.values())


def apply_mixer(
    R,
    spec: MixerSpec,
    params: dict[str, Var],
    accelerated: bool = False,
    attn_dropout: float = 0.0,
    rng: Optional[Rng] = None,
    training: bool = False,
    tape: Optional[Tape] = None,
) -> Var:
    """Run the mixer selected by ``spec`` on ``R`` ([.., L, D])."""
    kind = spec.kind
    if kind in (MixerKind.SA, MixerKind.SA_WINDOWED):
        return self_attention(
            R, params, causal=spec.causal,
            window=spec.window if kind is MixerKind.SA_WINDOWED else None,
            multiplicative_window=spec.multiplicative_window,
            attn_dropout=attn_dropout, rng=rng, training=training, tape=tape,
        )
    if kind in (MixerKind.SAR_O, MixerKind.SAR_R):
        return fixed_matrix_attention(
            R, params["a_matrix"], params, normalize=spec.normalize_fixed,
            causal=spec.causal, attn_dropout=attn_dropout, rng=rng,
            training=training, tape=tape,
        )
    if kind is MixerKind.SAR_P:
        return personalized_attention(
            R, params, causal=spec.causal, attn_dropout=attn_dropout,
            rng=rng, training=training, tape=tape,
        )
    if kind is MixerKind.SAR_N:
        return sar_n(
            R, params, causal=spec.causal, attn_dropout=attn_dropout,
            rng=rng, training=training, tape=tape,
        )
    if kind is MixerKind.SAR_NPLUS:
        return sar_nplus(
            R, params, causal=spec.causal, attn_dropout=attn_dropout,
            rng=rng, training=training, tape=tape,
        )
    if kind is MixerKind.SAR_W:
        return sar_w(R)
    if kind in (MixerKind.DWC_DIRECT, MixerKind.DWC_FFT):
        use_fft = accelerated or kind is MixerKind.DWC_FFT
        if use_fft:
            return dwc_fft(R, params["kernel"], padding=spec.padding, tape=tape)
        return dwc_direct(
            R, params["kernel"], padding=spec.padding, causal=spec.causal, tape=tape
        )
    if kind is MixerKind.CONV_V:
        return conv_full(
            R, params["kernel"], padding=spec.padding, causal=spec.causal, tape=tape
        )
    if kind is MixerKind.CONV_S:
        return conv_separable(
            R, params["kernel"], params["w_point"], padding=spec.padding,
            causal=spec.causal, tape=tape,
        )
    if kind is MixerKind.MLP_MIXER:
        return mlp_mixer(R, params["w_mix"], tape)
    raise ValueError(f"unknown mixer kind {kind!r}")
