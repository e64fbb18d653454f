"""Select the compiled kernels when available.

Set ``HERMITE_QMC_PURE=1`` to force the numpy fallback.
"""
import os

if os.environ.get("HERMITE_QMC_PURE", "") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
