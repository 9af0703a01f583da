"""Build script. The Cython kernel extension is optional: when it cannot be
compiled the package installs anyway and falls back to the numpy backend."""

import sys

from setuptools import setup

ext_modules = []
try:
    from setuptools import Extension

    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "convobot.net._fastkernels",
                ["src/convobot/net/_fastkernels.pyx"],
                extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
            )
        ],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"convobot: skipping Cython extension ({exc}); numpy backend will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
