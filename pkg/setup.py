"""Build script: compiles the optional Cython kernel core.

The package is fully functional without the extension (a NumPy fallback is
selected at import time).  To build the fast core in place:

    python setup.py build_ext --inplace

Set PFF_NO_EXT=1 to skip extension compilation entirely.
"""

import os

import numpy as np
from setuptools import Extension, setup

extensions = []
if not os.environ.get("PFF_NO_EXT"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "pffrac.kernels._fast",
                    ["src/pffrac/kernels/_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
