"""Build script: compiles the Cython window kernel when possible.

If the extension cannot be built (no compiler, no Cython) the package still
installs; the pure-numpy fallback in pssmplab._kernels is used instead.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("pssmplab._kernels._core",
                   ["src/pssmplab/_kernels/_core.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"pssmplab: skipping compiled kernel ({exc})", file=sys.stderr)
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
