"""Build script: compiles the optional polynomial-kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time), so any failure to build it is downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that gives up gracefully when no compiler is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            warnings.warn(f"skipping cpgeo._poly_speed extension: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            warnings.warn(f"skipping {ext.name}: {exc}")


def extension_modules():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - cython not installed
        return []
    return cythonize(
        [
            Extension(
                "cpgeo._poly_speed",
                ["src/cpgeo/_poly_speed.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(
    ext_modules=extension_modules(),
    cmdclass={"build_ext": OptionalBuildExt},
)
