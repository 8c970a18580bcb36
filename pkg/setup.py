"""Build script for the optional compiled recursion kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build degrades gracefully when Cython or a C compiler
is unavailable.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "membrane_etalon._kernels",
                ["src/membrane_etalon/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                # contraction off pins the loop to plain scalar complex
                # arithmetic; the NumPy fallback then agrees to ~1 ulp
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
