"""Build hook for the optional compiled enumeration kernel.

The package is fully functional without it (a pure-Python twin is selected
at import time); building the extension just speeds up the definite-form
enumeration hot loop.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("emptysextic._enum_fast",
                   ["src/emptysextic/_enum_fast.pyx"],
                   include_dirs=[numpy.get_include()])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
