"""Central finite-difference gradient oracle shared by the test modules."""

import numpy as np


def finite_diff_grads(fn, arrays: dict, h: float = 1e-5) -> dict:
    """Central-difference gradients of a scalar function of named arrays.

    ``fn`` must be a pure function of the dict contents (arrays are
    perturbed in place and restored).
    """
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        flat, gflat = arr.ravel(), g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            fp = fn(arrays)
            flat[i] = orig - h
            fm = fn(arrays)
            flat[i] = orig
            gflat[i] = (fp - fm) / (2.0 * h)
        grads[name] = g
    return grads


def max_rel_error(analytic: dict, numeric: dict) -> float:
    """Worst-case ||a - n||_inf / ||n||_inf across parameter tensors."""
    worst = 0.0
    for name, n in numeric.items():
        a = analytic.get(name)
        assert a is not None, f"missing analytic gradient for {name!r}"
        denom = max(np.abs(n).max(), 1e-12)
        worst = max(worst, np.abs(a - n).max() / denom)
    return worst
