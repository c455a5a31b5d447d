"""Builds the optional compiled kernels.

The package is fully functional without them (a NumPy fallback is selected at
import); building just makes the independence search and the rank iteration
faster:

    python setup.py build_ext --inplace
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "tamecert._kernels._speedups",
                ["src/tamecert/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
