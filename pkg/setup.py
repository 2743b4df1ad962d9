"""Builds the optional compiled kernels; the package works without them."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(["src/dgva/_kernels.pyx"], language_level=3, quiet=True)

setup(ext_modules=ext_modules)
