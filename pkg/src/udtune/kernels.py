"""Backend selection for the hot loops.

The compiled extension ``udtune._ckernels`` is used when it was built and
imports cleanly; otherwise the NumPy fallback in ``udtune._pykernels`` is
used. Setting ``UDTUNE_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("UDTUNE_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

glp_column = _impl.glp_column
cd2_squared = _impl.cd2_squared
cd2_scan = _impl.cd2_scan
cd2_absorb = _impl.cd2_absorb
helicopter_run = _impl.helicopter_run
# No NumPy twin: without the extension the quadrotor runs through the generic loop.
quadrotor_run = getattr(_impl, "quadrotor_run", None)


def backends():
    """Return ``{name: module}`` for every backend importable in this process."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
