"""Build script for the optional compiled kernel.

The package is pure Python plus one Cython extension (tailchi._kernels) holding
the clique-census inner loop.  The extension is optional: if Cython or a C
compiler is unavailable the install proceeds and the numpy fallback in
tailchi._kernels_py is selected at import time.  Set TAILCHI_NO_EXT=1 to skip
the extension build explicitly.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    # failing to compile must not fail the install; the pure backend covers it
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernel skipped ({exc}); using pure-python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using pure-python backend")


ext_modules = []
if os.environ.get("TAILCHI_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tailchi._kernels",
                    ["src/tailchi/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
