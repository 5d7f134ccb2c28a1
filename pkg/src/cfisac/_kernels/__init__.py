"""Monte Carlo hot kernels with a compiled core and a pure-numpy fallback.

The Cython extension ``_fast`` is used when it was built; setting the
environment variable ``CFISAC_PURE_PYTHON=1`` before import forces the
numpy reference implementation.  Both backends take identical arguments
and agree to floating-point reduction order.
"""

import os

import numpy as np

from . import _ref

try:
    from . import _fast  # compiled extension, optional
except ImportError:
    _fast = None

_impl = _ref if (_fast is None or os.environ.get("CFISAC_PURE_PYTHON")) else _fast


def backend_name() -> str:
    return "cython" if _impl is not None and _impl is _fast else "numpy"


def has_compiled_backend() -> bool:
    return _fast is not None


def use_backend(name: str):
    """Switch backend at runtime ("cython" or "numpy"); mainly for benchmarks."""
    global _impl
    if name == "numpy":
        _impl = _ref
    elif name == "cython":
        if _fast is None:
            raise RuntimeError("compiled kernel extension is not available")
        _impl = _fast
    else:
        raise ValueError(f"unknown backend {name!r}")


def _c128(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def mc_pair_gains(h, h_hat, sqrt_gamma, sqrt_eta, a):
    return _impl.mc_pair_gains(_c128(h), _c128(h_hat), _f64(sqrt_gamma),
                               _f64(sqrt_eta), _c128(a))


def precoder_covariance(h_hat, sqrt_gamma, sqrt_eta, a):
    return _impl.precoder_covariance(_c128(h_hat), _f64(sqrt_gamma),
                                     _f64(sqrt_eta), _c128(a))
