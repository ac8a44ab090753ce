"""Build script: compiles the optional history-convolution extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here is non-fatal by design: building from a
source tree without Cython simply skips the extension.
"""
from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "fracsolve._kernels",
                ["src/fracsolve/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # pragma: no cover - build environment without Cython
    extensions = []

setup(ext_modules=extensions)
