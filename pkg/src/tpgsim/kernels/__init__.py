"""Backend selection for the grid kernels.

The environment flag TPG_KERNELS picks the implementation:

  TPG_KERNELS=numba   require the jitted kernels, fail loudly if numba is absent
  TPG_KERNELS=numpy   force the pure-numpy path
  unset               use numba when importable, numpy otherwise

Both backends expose the same three functions with identical semantics;
tests and the benchmark compare them directly via get_backend().
"""

import os

import numpy as np

from ..errors import ConfigError
from . import _numpy

_BACKENDS = {"numpy": _numpy}
_numba_error = None
try:
    from . import _numba
    _BACKENDS["numba"] = _numba
except ImportError as exc:  # numba not installed, numpy path still works
    _numba_error = exc

_flag = os.environ.get("TPG_KERNELS", "").strip().lower()
if _flag and _flag not in ("numpy", "numba"):
    raise ConfigError(
        "TPG_KERNELS must be 'numpy' or 'numba', got %r" % _flag)
if _flag == "numba" and "numba" not in _BACKENDS:
    raise ConfigError(
        "TPG_KERNELS=numba but the numba backend is unavailable: %s" % _numba_error)
_default = _flag or ("numba" if "numba" in _BACKENDS else "numpy")


def backend_name():
    """Name of the backend the module-level functions dispatch to."""
    return _default


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend(name=None):
    """Return the backend module for `name` (default: the selected one)."""
    name = name or _default
    if name not in _BACKENDS:
        raise ConfigError("unknown kernel backend %r (available: %s)"
                          % (name, ", ".join(sorted(_BACKENDS))))
    return _BACKENDS[name]


def hermite_table(xs, nmax):
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    return get_backend().hermite_table(xs, nmax)


def laguerre_wigner_table(r2, d):
    r2 = np.ascontiguousarray(r2, dtype=np.float64)
    return get_backend().laguerre_wigner_table(r2, d)


def displaced_parity_stack(alphas, d):
    alphas = np.ascontiguousarray(alphas, dtype=np.complex128)
    return get_backend().displaced_parity_stack(alphas, d)


hermite_table.__doc__ = _numpy.hermite_table.__doc__
laguerre_wigner_table.__doc__ = _numpy.laguerre_wigner_table.__doc__
displaced_parity_stack.__doc__ = _numpy.displaced_parity_stack.__doc__
