"""Select the compiled kernels when available, the numpy versions otherwise.

Set ``BMNC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("BMNC_PURE_PYTHON"):
    kernels = _fallback
    NAME = "python"
else:
    try:
        from . import _kernels as kernels
        NAME = "cython"
    except ImportError:
        kernels = _fallback
        NAME = "python"
