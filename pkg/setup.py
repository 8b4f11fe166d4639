"""Builds the optional Cython alignment kernel.

The package is fully functional without the extension: `nbestkit.edit`
falls back to the pure-Python kernel at import time. Set NBESTKIT_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to a pure-Python install when compilation is impossible."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            print(f"warning: skipping C extension build ({exc}); "
                  "nbestkit will use the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "nbestkit will use the pure-Python kernel")


ext_modules = []
if os.environ.get("NBESTKIT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("nbestkit._levenshtein_cy",
                       ["src/nbestkit/_levenshtein_cy.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
