"""Builds the optional compiled simplex kernel.

If Cython or a C compiler is missing the package still installs and uses the
numpy kernel in ``mia_routing._simplex_py``.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MIA_ROUTING_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("mia_routing._simplex_core", ["src/mia_routing/_simplex_core.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
