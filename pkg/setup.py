from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "jacobiflow._kernels._cycore",
    sources=["src/jacobiflow/_kernels/_cycore.pyx"],
    extra_compile_args=["-O3"],
)

setup(ext_modules=cythonize([ext], language_level="3"))
