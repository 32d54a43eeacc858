"""Build script: compiles the split-scan kernel when Cython is available.

The package works without the extension (a numpy fallback is selected at
import time); set OVERLAPTREE_PURE_PYTHON=1 to skip the build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("OVERLAPTREE_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "overlaptree._split_cy",
                    ["src/overlaptree/_split_cy.pyx"],
                    # fp-contract off: the numpy fallback must stay bit-identical
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
