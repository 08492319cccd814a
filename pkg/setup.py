"""Build script: compiles the optional antichain kernel extension.

The package works without the extension (a pure-Python kernel with the same
API is selected at import time), so any failure here degrades gracefully to
a source-only install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/divmart/_kernel.pyx"],
        language_level=3,
    )
except Exception as exc:  # Cython missing or cythonization failed
    print(f"divmart: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
