"""Build script: compiles the optional Cython recursion core.

The package works without the extension (a pure Python twin is selected at
import time), so a failed compile downgrades to a warning instead of killing
the install.
"""

import sys
from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "volalab._recursions",
                ["src/volalab/_recursions.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - degraded build path
    print(f"volalab: building without the compiled core ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
