"""Build script: compiles the optional bitset kernel extension.

The package works without the extension (a pure-Python kernel is selected
at import time), so any failure here downgrades to a source-only install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("boolgram._ckernel", ["src/boolgram/_ckernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"boolgram: skipping compiled kernel ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
