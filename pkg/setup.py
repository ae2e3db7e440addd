import os

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Keep installing when the compiler is missing; the numpy fallback takes over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self.warn(f"compiled kernels not built ({exc}); using the pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self.warn(f"building {ext.name} failed ({exc}); using the pure-Python fallback")


ext_modules = []
if os.environ.get("OFFENSEVAL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        try:
            ext_modules = cythonize(
                [
                    Extension(
                        "offenseval._kernels._core",
                        ["src/offenseval/_kernels/_core.pyx"],
                        include_dirs=[np.get_include()],
                        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                        extra_compile_args=["-O3"],
                    )
                ],
                compiler_directives={"language_level": "3", "embedsignature": True},
            )
        except Exception as exc:  # noqa: BLE001
            print(f"cythonize failed ({exc}); installing without compiled kernels")
            ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
