"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set HOLOSPT_PURE_PYTHON=1 to
force the numpy fallback. Both backends return identical results.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if not os.environ.get("HOLOSPT_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
        BACKEND = "cython"
    except ImportError:
        pass


def backend(name=None):
    """Return the kernel module for `name` ("cython" or "python"), or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def pack_masks(masks, n_bits):
    """Pack Python int bitmasks into a (len(masks), words) uint64 array."""
    w = max(1, (n_bits + 63) // 64)
    out = np.zeros((len(masks), w), dtype=np.uint64)
    lim = (1 << 64) - 1
    for i, m in enumerate(masks):
        for k in range(w):
            out[i, k] = (m >> (64 * k)) & lim
    return out


def symplectic_gram(x_masks, z_masks, n_bits, impl=None):
    impl = impl or _impl
    return impl.symplectic_gram(pack_masks(x_masks, n_bits), pack_masks(z_masks, n_bits))


def gf2_rank(masks, n_bits, impl=None):
    if not masks:
        return 0
    impl = impl or _impl
    return int(impl.gf2_rank(pack_masks(masks, n_bits)))


def gf2_solve(masks, target, n_bits, impl=None):
    """Indices of rows whose XOR is `target`, or None when target is outside the span."""
    if not masks:
        return [] if target == 0 else None
    impl = impl or _impl
    sol = impl.gf2_solve(pack_masks(masks, n_bits), pack_masks([target], n_bits)[0])
    if sol is None:
        return None
    return [int(i) for i in np.nonzero(sol)[0]]


def null_box(A, eq, mod_rows, mod_vals, cutoff, impl=None):
    impl = impl or _impl
    n = len(A)
    A = np.ascontiguousarray(A, dtype=np.int64)
    eq = np.ascontiguousarray(np.reshape(eq, (-1, n)), dtype=np.int64)
    mod_rows = np.ascontiguousarray(np.reshape(mod_rows, (-1, n)), dtype=np.int64)
    mod_vals = np.ascontiguousarray(mod_vals, dtype=np.int64).reshape(-1)
    found = impl.null_box(A, eq, mod_rows, mod_vals, int(cutoff))
    found = np.asarray(found, dtype=np.int64).reshape(-1, n)
    if len(found) == 0:
        return found
    order = np.lexsort(found.T[::-1])
    return found[order]
