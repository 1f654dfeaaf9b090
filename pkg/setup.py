"""Build hook for the optional compiled kernels.

Without Cython or a C compiler the package installs pure-Python and
``degmaps.kernels`` falls back automatically.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("degmaps._kernels", ["src/degmaps/_kernels.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )

setup(ext_modules=ext_modules)
