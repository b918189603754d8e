"""Build script for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the Monte
Carlo hot loops.  The extension is a strict accelerator: if it cannot be
built (no compiler, no Cython) the install still succeeds and the numpy
kernels take over at import time, so failure here is downgraded to a
warning on purpose.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

PYX = os.path.join("src", "kptau", "_speedups.pyx")


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            warnings.warn(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}: {exc}")


def extensions():
    if not os.path.exists(PYX):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "kptau._speedups",
        [PYX],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
