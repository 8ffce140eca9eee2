"""Build shim: compiles the optional exact-elimination extension.

The package is pure Python; the Cython kernel in src/ncdef/_corekernel.pyx
only speeds up row reduction. If Cython or a C compiler is missing, the
build falls back to the pure-Python kernel silently.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"ncdef: skipping compiled kernel ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"ncdef: skipping {ext.name} ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    return cythonize(
        [Extension("ncdef._corekernel", ["src/ncdef/_corekernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
