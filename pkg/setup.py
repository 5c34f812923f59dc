"""Build script: compiles the optional dispatch kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time); the build therefore degrades gracefully when no compiler or
Cython is available.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "synfuel._core",
                ["src/synfuel/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"warning: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
