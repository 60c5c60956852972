"""Build the optional compiled quadrature core; the package works without it."""

from __future__ import annotations

import os

from setuptools import setup

ext_modules = []
if os.environ.get("RECURSUM_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("recursum.quadrature._core", ["src/recursum/quadrature/_core.pyx"], libraries=["m"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )

setup(ext_modules=ext_modules)
