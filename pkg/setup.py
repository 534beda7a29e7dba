"""Build the optional compiled kernels.

The package works without them; ``hydroq._core`` falls back to NumPy
implementations when the extension is missing.

    python3 setup.py build_ext --inplace
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "hydroq._core._kernels",
        ["src/hydroq/_core/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
