import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

openmp = os.environ.get("SEPARATRIX_NO_OPENMP") is None
compile_args = ["-O3", "-ffp-contract=off"]
link_args = []
if openmp:
    compile_args.append("-fopenmp")
    link_args.append("-fopenmp")

extensions = [
    Extension(
        "separatrix._core",
        ["src/separatrix/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
