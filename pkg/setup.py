"""Build the compiled kernel extension.

The package works without it (a numpy fallback is selected at import time),
so a missing Cython/toolchain only costs speed. Developers can rebuild
in place with: python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "dictner.neural.kernels._core",
                ["src/dictner/neural/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
