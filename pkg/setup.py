"""Build the optional compiled kernel.

The extension links against the GMP copy that gmpy2 itself uses (a
bundled shared library in wheels, the system one otherwise).  Any build
failure is reported and the pure-Python kernel is used instead.
"""

import glob
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _gmp_link_args():
    import gmpy2

    pkg = os.path.dirname(gmpy2.__file__)
    bundled = sorted(glob.glob(os.path.join(pkg, os.pardir, "gmpy2.libs", "libgmp*.so*")))
    if bundled:
        lib = os.path.abspath(bundled[0])
        return [pkg], [lib, "-Wl,-rpath," + os.path.dirname(lib)], []
    return [pkg], [], ["gmp"]


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled kernel not built ({exc}); using pure Python", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: failed to build {ext.name} ({exc}); using pure Python", file=sys.stderr)


def _extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        includes, link_args, libs = _gmp_link_args()
    except Exception as exc:  # pragma: no cover
        print(f"warning: Cython/gmpy2 unavailable ({exc}); skipping compiled kernel", file=sys.stderr)
        return []
    ext = Extension(
        "orbitfold.algebra._kernels",
        ["src/orbitfold/algebra/_kernels.pyx"],
        include_dirs=includes,
        extra_link_args=link_args,
        libraries=libs,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"}, quiet=True)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
