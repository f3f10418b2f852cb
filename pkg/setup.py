from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("tropic2sdp._psd_cy", ["src/tropic2sdp/_psd_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython: install pure-Python only, the kernel selector falls back.
    ext_modules = []

setup(ext_modules=ext_modules)
