"""Reverse-mode gradients for the fixed op set the architecture needs.

Values are immutable float64 numpy arrays wrapped in :class:`Var`.  Ops
optionally record an adjoint closure on a :class:`Tape`; running
:func:`backward` replays the closures in reverse and returns gradients
for every named leaf touched by the forward pass.  This is deliberately
not a general autodiff system: only the primitives used by the model
exist, each with a hand-derived adjoint that is finite-difference checked
in the test suite.
"""

from __future__ import annotations

from typing import Callable, Optional, Union

import numpy as np

from .rng import Rng

ArrayLike = Union[np.ndarray, float, int, list]


class Var:
    """A tensor value participating in differentiable computation."""

    __slots__ = ("data", "grad", "name")

    def __init__(self, data: ArrayLike, name: Optional[str] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Var(shape={self.data.shape}{tag})"


class Tape:
    """Ordered record of executed ops and the vars they touched."""

    def __init__(self):
        self._entries: list[Callable[[], None]] = []
        self._touched: list[Var] = []

    def record(self, backward_fn: Callable[[], None], *vars_touched: Var) -> None:
        self._entries.append(backward_fn)
        self._touched.extend(vars_touched)

    def __len__(self):
        return len(self._entries)


def accumulate(var: Var, g: np.ndarray) -> None:
    """Add a gradient contribution to ``var`` (lazy-initialized)."""
    var.grad = g if var.grad is None else var.grad + g


def backward(tape: Tape, loss: Var) -> dict[str, np.ndarray]:
    """Replay adjoints in reverse; return gradients for named leaves.

    Grad buffers on every touched var are cleared afterwards so parameter
    vars can be reused across training steps.
    """
    if loss.data.size != 1:
        raise ValueError(f"loss must be scalar, got shape {loss.data.shape}")
    loss.grad = np.ones_like(loss.data)
    for fn in reversed(tape._entries):
        fn()
    grads: dict[str, np.ndarray] = {}
    for v in tape._touched:
        if v.name is not None and v.grad is not None and v.name not in grads:
            grads[v.name] = v.grad
    for v in tape._touched:
        v.grad = None
    loss.grad = None
    return grads


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to the shape it was broadcast from."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _split(x) -> tuple[np.ndarray, Optional[Var]]:
    """Constant arrays pass through; Vars also return themselves."""
    if isinstance(x, Var):
        return x.data, x
    return np.asarray(x, dtype=np.float64), None


# ---------------------------------------------------------------------------
# arithmetic primitives
# ---------------------------------------------------------------------------


def add(a, b, tape: Optional[Tape] = None) -> Var:
    ad, av = _split(a)
    bd, bv = _split(b)
    out = Var(ad + bd)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            if av is not None:
                accumulate(av, _unbroadcast(g, ad.shape))
            if bv is not None:
                accumulate(bv, _unbroadcast(g, bd.shape))

        tape.record(bwd, *(v for v in (av, bv, out) if v is not None))
    return out


def sub(a, b, tape: Optional[Tape] = None) -> Var:
    ad, av = _split(a)
    bd, bv = _split(b)
    out = Var(ad - bd)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            if av is not None:
                accumulate(av, _unbroadcast(g, ad.shape))
            if bv is not None:
                accumulate(bv, _unbroadcast(-g, bd.shape))

        tape.record(bwd, *(v for v in (av, bv, out) if v is not None))
    return out


def mul(a, b, tape: Optional[Tape] = None) -> Var:
    ad, av = _split(a)
    bd, bv = _split(b)
    out = Var(ad * bd)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            if av is not None:
                accumulate(av, _unbroadcast(g * bd, ad.shape))
            if bv is not None:
                accumulate(bv, _unbroadcast(g * ad, bd.shape))

        tape.record(bwd, *(v for v in (av, bv, out) if v is not None))
    return out


def scale(a: Var, s: float, tape: Optional[Tape] = None) -> Var:
    out = Var(a.data * s)
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, out.grad * s)

        tape.record(bwd, a, out)
    return out


def matmul(a, b, tape: Optional[Tape] = None) -> Var:
    """Batched matrix product; both operands must have ndim >= 2."""
    ad, av = _split(a)
    bd, bv = _split(b)
    if ad.ndim < 2 or bd.ndim < 2:
        raise ValueError("matmul operands must have at least 2 dimensions")
    out = Var(ad @ bd)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            if av is not None:
                accumulate(av, _unbroadcast(g @ np.swapaxes(bd, -1, -2), ad.shape))
            if bv is not None:
                accumulate(bv, _unbroadcast(np.swapaxes(ad, -1, -2) @ g, bd.shape))

        tape.record(bwd, *(v for v in (av, bv, out) if v is not None))
    return out


def relu(a: Var, tape: Optional[Tape] = None) -> Var:
    # derivative at exactly 0 is defined as 0
    keep = a.data > 0
    out = Var(np.where(keep, a.data, 0.0))
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, out.grad * keep)

        tape.record(bwd, a, out)
    return out


def sum_all(a: Var, tape: Optional[Tape] = None) -> Var:
    out = Var(a.data.sum())
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, np.broadcast_to(out.grad, a.data.shape))

        tape.record(bwd, a, out)
    return out


def sum_last(a: Var, tape: Optional[Tape] = None) -> Var:
    out = Var(a.data.sum(axis=-1))
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, np.broadcast_to(out.grad[..., None], a.data.shape))

        tape.record(bwd, a, out)
    return out


def reshape(a: Var, shape, tape: Optional[Tape] = None) -> Var:
    out = Var(a.data.reshape(shape))
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, out.grad.reshape(a.data.shape))

        tape.record(bwd, a, out)
    return out


def transpose_last2(a: Var, tape: Optional[Tape] = None) -> Var:
    out = Var(np.swapaxes(a.data, -1, -2))
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(a, np.swapaxes(out.grad, -1, -2))

        tape.record(bwd, a, out)
    return out


def last_position(a: Var, tape: Optional[Tape] = None) -> Var:
    """Select the final time step: [..., L, D] -> [..., D]."""
    out = Var(a.data[..., -1, :].copy())
    if tape is not None:

        def bwd():
            if out.grad is not None:
                g = np.zeros_like(a.data)
                g[..., -1, :] = out.grad
                accumulate(a, g)

        tape.record(bwd, a, out)
    return out


def softplus(a: Var, tape: Optional[Tape] = None) -> Var:
    """log(1 + exp(x)), computed without overflow."""
    x = a.data
    out = Var(np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x))))
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            # sigmoid(x), stable on both tails
            sig = np.where(
                x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))),
            )
            accumulate(a, g * sig)

        tape.record(bwd, a, out)
    return out


def gather_rows(table: Var, ids, tape: Optional[Tape] = None) -> Var:
    """Embedding lookup: rows of ``table`` indexed by an int array."""
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= table.data.shape[0]):
        raise ValueError(
            f"index out of range [0, {table.data.shape[0]}): "
            f"min={ids.min()}, max={ids.max()}"
        )
    out = Var(table.data[ids])
    if tape is not None:

        def bwd():
            if out.grad is None:
                return
            g = np.zeros_like(table.data)
            np.add.at(g, ids, out.grad)
            accumulate(table, g)

        tape.record(bwd, table, out)
    return out


# ---------------------------------------------------------------------------
# normalization, attention softmax, dropout
# ---------------------------------------------------------------------------


def layer_norm(
    x, gamma, beta, eps: float = 1e-12, tape: Optional[Tape] = None
) -> Var:
    """Row-wise normalization over the last axis, then affine.

    Uses the biased (1/D) variance estimator.  Constant rows normalize to
    zero (so the output is ``beta``) because eps keeps the denominator
    finite.
    """
    xd, xv = _split(x)
    gd, gv = _split(gamma)
    bd, bv = _split(beta)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if xd.shape[-1] != gd.shape[-1] or xd.shape[-1] != bd.shape[-1]:
        raise ValueError(
            f"feature size mismatch: x has {xd.shape[-1]}, "
            f"gamma {gd.shape[-1]}, beta {bd.shape[-1]}"
        )
    if not np.all(np.isfinite(xd)):
        raise ValueError("non-finite values in layer_norm input")
    mu = xd.mean(axis=-1, keepdims=True)
    xc = xd - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out = Var(xhat * gd + bd)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None:
                return
            if gv is not None:
                accumulate(gv, _unbroadcast(g * xhat, gd.shape))
            if bv is not None:
                accumulate(bv, _unbroadcast(g, bd.shape))
            if xv is not None:
                dxhat = g * gd
                m1 = dxhat.mean(axis=-1, keepdims=True)
                m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
                accumulate(xv, inv * (dxhat - m1 - xhat * m2))

        tape.record(bwd, *(v for v in (xv, gv, bv, out) if v is not None))
    return out


def softmax_rows(logits, mask=None, tape: Optional[Tape] = None) -> Var:
    """Max-subtracted softmax over the last axis.

    ``mask`` is a constant {0,1} array broadcastable to the logits; masked
    entries come out exactly 0 and receive no gradient.  A fully masked
    row is an error.
    """
    ld, lv = _split(logits)
    if mask is not None:
        maskb = np.broadcast_to(np.asarray(mask) != 0, ld.shape)
        if not maskb.any(axis=-1).all():
            raise ValueError("softmax row with every entry masked")
        z = np.where(maskb, ld, -np.inf)
    else:
        z = ld
    m = z.max(axis=-1, keepdims=True)
    e = np.exp(z - m)
    s = e / e.sum(axis=-1, keepdims=True)
    out = Var(s)
    if tape is not None:

        def bwd():
            g = out.grad
            if g is None or lv is None:
                return
            inner = (g * s).sum(axis=-1, keepdims=True)
            accumulate(lv, s * (g - inner))

        tape.record(bwd, *(v for v in (lv, out) if v is not None))
    return out


def dropout(
    x: Var, p: float, rng: Optional[Rng], training: bool, tape: Optional[Tape] = None
) -> Var:
    """Inverted dropout: zero with probability p, scale survivors by 1/(1-p)."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    if rng is None:
        raise ValueError("training dropout requires an Rng")
    keep = rng.uniform_array(x.data.shape) >= p
    factor = keep / (1.0 - p)
    out = Var(x.data * factor)
    if tape is not None:

        def bwd():
            if out.grad is not None:
                accumulate(x, out.grad * factor)

        tape.record(bwd, x, out)
    return out
