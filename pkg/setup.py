from setuptools import setup

# The compiled dual-number kernel is optional: if Cython (or a C compiler)
# is unavailable the package falls back to the pure-Python implementation
# in gnk._dual_py, selected at import time by gnk.dual.
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "gnk._dualcore",
                ["src/gnk/_dualcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
