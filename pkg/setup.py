"""Build script: compiles the 2x2-recurrence kernels when a toolchain is present.

The package works without the extension (pure-Python fallbacks in
cmvsub._kernels.pykernels); compilation failures are downgraded to a warning
so `pip install -e . --no-build-isolation` succeeds on hosts without a C
compiler.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/cmvsub/_kernels/_ckernels.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # Cython/numpy missing: fall back to pure Python
    warnings.warn(f"building without compiled kernels: {exc}")
    include_dirs = []

for ext in ext_modules:
    ext.include_dirs = include_dirs


class _OptionalBuild:
    """Mixin that turns compiler errors into a pure-Python install."""


def _build_ext_factory():
    from setuptools.command.build_ext import build_ext

    class optional_build_ext(build_ext):
        def run(self):
            try:
                super().run()
            except Exception as exc:
                warnings.warn(f"compiled kernels skipped: {exc}")

        def build_extension(self, ext):
            try:
                super().build_extension(ext)
            except Exception as exc:
                warnings.warn(f"extension {ext.name} skipped: {exc}")

    return optional_build_ext


setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": _build_ext_factory()} if ext_modules else {},
)
