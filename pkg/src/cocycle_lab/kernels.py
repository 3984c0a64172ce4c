"""Backend selection for the Cayley-table kernels.

The compiled extension is used when it imports; set
``COCYCLE_LAB_BACKEND=python`` to force the numpy fallback.
"""
import os

import numpy as np

from . import _pykernels
from .errors import CarrierClosureError

_backend = _pykernels
BACKEND = "python"
if os.environ.get("COCYCLE_LAB_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _backend  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _backend = _pykernels


def _table(mul):
    return np.ascontiguousarray(mul, dtype=np.int64)


def _vec(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def convolve(mul, a, b, backend=None):
    """Coefficients of ``(sum a_g g)(sum b_h h)`` over the table ``mul``."""
    impl = backend or _backend
    out, escaped = impl.convolve(_table(mul), _vec(a), _vec(b))
    if escaped:
        raise CarrierClosureError("product leaves the carrier", operation="convolve")
    return np.asarray(out)


def gram_convolve(mul, inv, a, b, weight=None, backend=None):
    """``sum_{g,h} conj(a_g) b_h w(g,h) [g^-1 h]`` -- gives ``a* b`` when ``w = 1``."""
    impl = backend or _backend
    n = len(a)
    if weight is None:
        weight = np.ones((n, n))
    out, escaped = impl.gram_convolve(
        _table(mul), np.ascontiguousarray(inv, dtype=np.int64), _vec(a), _vec(b),
        np.ascontiguousarray(weight, dtype=np.float64))
    if escaped:
        raise CarrierClosureError("product leaves the carrier", operation="gram_convolve")
    return np.asarray(out)


def regular_matrix(mul, a, backend=None):
    impl = backend or _backend
    mul, a = _table(mul), _vec(a)
    if (mul[a != 0] < 0).any():
        raise CarrierClosureError("left multiplication leaves the carrier",
                                  operation="regular_matrix")
    return np.asarray(impl.regular_matrix(mul, a))


def is_latin(mul, backend=None):
    return bool((backend or _backend).is_latin(_table(mul)))


def associativity_exhaustive(mul, backend=None):
    return (backend or _backend).associativity_exhaustive(_table(mul))


def associativity_sampled(mul, triples, backend=None):
    return (backend or _backend).associativity_sampled(
        _table(mul), np.ascontiguousarray(triples, dtype=np.int64))


def backends():
    """Available implementations keyed by name (for tests and the benchmark)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
