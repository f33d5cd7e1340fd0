from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    # -ffp-contract=off keeps results bitwise identical to the pure-Python
    # kernels (no FMA contraction); the equivalence tests rely on it.
    extensions = cythonize(
        [
            Extension(
                "snalab._kernels",
                ["src/snalab/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # Source distribution without Cython: fall back to the pure-Python kernels.
    extensions = []

setup(ext_modules=extensions)
