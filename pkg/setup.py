"""Build script for the optional compiled simplex kernels.

The package works without the extension: covreplan.lpsolve falls back to a
pure numpy implementation of the same kernels at import time.  Build the
fast path with:

    pip install -e . --no-build-isolation
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        ["src/covreplan/lpsolve/_kernels.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    include_dirs = []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
