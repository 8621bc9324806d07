import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SYMDET_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        extensions = [
            Extension(
                "symdet._ckernels",
                ["src/symdet/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        # pure-Python fallback in symdet._pykernels takes over
        ext_modules = []

setup(ext_modules=ext_modules)
