"""Build script for the compiled hull/sweep kernels.

The package works without the extension (a pure NumPy/Python backend is
selected at import time); building it just makes the grid oracles much
faster.  Set PLANARELAX_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("PLANARELAX_NO_EXT") == "1":
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "planarelax._kernels._hull",
        ["src/planarelax/_kernels/_hull.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
