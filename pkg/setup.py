"""Build the optional Cython window-moment kernel.

The package works without it; ``ssimlab._backend`` falls back to numpy.
"""
import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SSIMLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "ssimlab._window",
                    ["src/ssimlab/_window.pyx"],
                    include_dirs=[numpy.get_include()],
                    # no FMA contraction: results must match the numpy path bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
