"""Hot kernels, compiled when available.

The Cython extension ``_kernels`` is used when it was built; otherwise the
pure-Python twin in ``_kernels_py`` is used. Setting ``GW_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("GW_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
newton_bethe = _impl.newton_bethe
bethe_residual = _impl.bethe_residual

OK, SINGULAR, STALL, ESCAPE, MAXITER, DOMAIN = range(6)
STATUS_NAMES = ("ok", "singular", "stall", "escape", "maxiter", "domain")


def available_backends() -> dict:
    """Map backend name to module for every implementation that imports."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
