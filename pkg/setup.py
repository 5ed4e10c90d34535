"""Build script for the optional compiled walk kernels.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time); the extension just makes the
Monte Carlo and exact-walk inner loops much faster.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wnrqc._kernels",
                ["src/wnrqc/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
