import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

compile_args = ["-O3", "-fopenmp"]
if os.environ.get("HERMITE_QMC_NATIVE", "1") == "1":
    compile_args.append("-march=native")

extensions = [
    Extension(
        "hermite_qmc._kernels",
        ["src/hermite_qmc/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=["-fopenmp"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
