import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speed kernels if possible; the package works without them."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cython missing, ...
            print("wittlab: skipping compiled kernels (%s)" % exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print("wittlab: skipping %s (%s)" % (ext.name, exc))


ext_modules = []
if not os.environ.get("WITTLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("wittlab.kernels._speed", ["src/wittlab/kernels/_speed.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(
    ext_modules=ext_modules,
    cmdclass={"build_ext": OptionalBuildExt},
)
