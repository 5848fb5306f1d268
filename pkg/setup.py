"""Build script: compiles the min-cost-flow kernel when Cython is available.

The package works without the extension (a pure-Python kernel is selected
at import time), so a missing/failed compile degrades to a slower install
instead of breaking it.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "pcdnsched._mcmf_cy",
                ["src/pcdnsched/_mcmf_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
