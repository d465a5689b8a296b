import os

from setuptools import setup

ext_modules = []
if os.environ.get("QKDV_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        ext_modules = cythonize(["src/qkdv/_kernels.pyx"], language_level=3, quiet=True)
    except ImportError:
        pass

setup(ext_modules=ext_modules)
