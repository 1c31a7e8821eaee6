"""Build script for the optional compiled kernels.

The package is fully functional without the extension; the pure-Python
kernels in photonwait._kernels.reference are used as a fallback.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "photonwait._kernels._fast",
                ["src/photonwait/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    print(f"warning: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
