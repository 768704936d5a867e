# Builds the compiled strided-index kernels.  The package works without the
# extension (pure-numpy fallback selected at import), so a failed build is
# not fatal for `pip install --no-binary`-style environments.
import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "qvsim._kernels_cy",
    sources=["src/qvsim/_kernels_cy.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}))
