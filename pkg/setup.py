"""Build shim for the optional compiled kernel.

The package is pure Python plus one Cython extension (cosetx._kernels._core).
If Cython or a C compiler is unavailable the extension is skipped and the
package falls back to the numpy kernel at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cosetx._kernels._core",
                sources=["src/cosetx/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
