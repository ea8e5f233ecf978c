"""Build script for the optional compiled Monte Carlo kernel.

The extension is marked optional: if no C toolchain (or Cython/scipy headers)
is available the build emits a warning and the package falls back to the
pure-numpy kernel at import time.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "molrelay.simulator._mc_ext",
    sources=["src/molrelay/simulator/_mc_ext.pyx"],
    include_dirs=[np.get_include()],
    # -O3 without -ffast-math: the kernel must keep IEEE semantics so the
    # compiled and pure backends produce bit-identical streams.
    extra_compile_args=["-O3"],
    optional=True,
)

setup(
    ext_modules=cythonize(
        [ext],
        compiler_directives={"language_level": "3"},
    )
)
