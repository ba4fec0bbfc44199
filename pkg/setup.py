"""Build script: compiles the optional simulation kernel extension.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time), so a failed or skipped build must
never fail the install.  Set FALAB_NO_EXT=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping extension build ({exc}); "
                  f"falling back to the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  f"falling back to the pure-Python kernel")


extensions = []
if not os.environ.get("FALAB_NO_EXT"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [Extension("falab._simkernel", ["src/falab/_simkernel.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("warning: Cython not available; building without the "
              "compiled simulation kernel")

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
