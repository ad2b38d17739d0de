import os
import sys

from setuptools import Extension, setup


def extensions():
    if os.environ.get("HOLOSPT_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("Cython or numpy missing; building pure-Python only", file=sys.stderr)
        return []
    ext = Extension(
        "holospt._kernels",
        ["src/holospt/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
