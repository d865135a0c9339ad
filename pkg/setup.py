"""Build script for the compiled recursion kernels.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the path/limit recursions much faster.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "levymlmc._kernels._core",
            sources=["src/levymlmc/_kernels/_core.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    print("Cython/numpy not available at build time; installing pure-Python only.")
    ext_modules = []

setup(ext_modules=ext_modules)
