from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # no build toolchain: ship the pure-Python kernels only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "trendtrace._kernels._cy",
                ["src/trendtrace/_kernels/_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
