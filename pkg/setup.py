"""Build script: compiles the optional stencil extension.

Set SURFCALC_NO_EXT=1 to skip the compiled kernels; the package then runs
on the pure-numpy backend.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SURFCALC_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "surfcalc._kernels._stencilc",
                    ["src/surfcalc/_kernels/_stencilc.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
