"""Build script: compiles the optional Cython stepper kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time), so any build failure here downgrades
to a source-only install instead of aborting.
"""

import os
import sys

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension
except ImportError:
    cythonize = None

_PYX = os.path.join("src", "stafermi", "_kernel", "_ode_cy.pyx")

ext_modules = []
if cythonize is not None and os.path.exists(_PYX):
    ext_modules = cythonize(
        [
            Extension(
                "stafermi._kernel._ode_cy",
                [_PYX],
                # -ffp-contract=off keeps the C arithmetic bit-identical to
                # the pure-Python kernel (no FMA contraction).
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

try:
    setup(ext_modules=ext_modules)
except SystemExit:
    if not ext_modules:
        raise
    print("warning: extension build failed, installing pure-Python package",
          file=sys.stderr)
    setup(ext_modules=[])
