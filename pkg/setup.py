import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DYADIC_HILBERT_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dyadic_hilbert._kernels",
                    ["src/dyadic_hilbert/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # pure-Python fallback is selected at import time
        ext_modules = []

setup(ext_modules=ext_modules)
