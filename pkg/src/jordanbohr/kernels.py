"""Kernel backend selection: the compiled extension when importable, else numpy.

Set ``JORDANBOHR_KERNELS=python`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("JORDANBOHR_KERNELS", "").lower() == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

series_mul = _impl.series_mul
series_recip = _impl.series_recip
majorant_crossings = _impl.majorant_crossings

__all__ = ["BACKEND", "series_mul", "series_recip", "majorant_crossings"]
