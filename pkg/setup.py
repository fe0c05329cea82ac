"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure numpy
backend is selected at import time); building it just makes the
optimizer inner loop faster.  `pip install -e . --no-build-isolation`
or `python setup.py build_ext --inplace` will compile it when Cython,
numpy headers and a C compiler are available.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "qtl._kernels._fast",
        sources=["src/qtl/_kernels/_fast.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext.optional = True  # never fail the install over the extension
    ext_modules = cythonize([ext], language_level="3")
except ImportError:
    pass

setup(ext_modules=ext_modules)
