"""Select the compiled kernel when available.

Set ``CREMBED_PURE_PYTHON=1`` to force the pure-Python implementation.
"""

import os

from . import _kernel_py

BACKEND = "python"
mul_terms = _kernel_py.mul_terms

if not os.environ.get("CREMBED_PURE_PYTHON"):
    try:
        from . import _kernel  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        mul_terms = _kernel.mul_terms
        BACKEND = "compiled"
