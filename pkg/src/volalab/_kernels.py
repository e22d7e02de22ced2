"""Recursion backend selection.

Prefers the compiled extension; falls back to the pure Python twin when the
extension is missing or when VOLALAB_PURE_PYTHON is set (useful for
benchmarks and for debugging the twins against each other).
"""

import os
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from . import _recursions_python as rec
else:
    if os.environ.get("VOLALAB_PURE_PYTHON"):
        from . import _recursions_python as rec
    else:
        try:
            from . import _recursions as rec
        except ImportError:
            from . import _recursions_python as rec

COMPILED = rec.__name__.endswith("._recursions")


def backend_name() -> str:
    return "compiled" if COMPILED else "pure-python"
