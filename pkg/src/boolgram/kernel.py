"""Kernel selection: compiled pair table when available, pure Python otherwise.

The environment variable BOOLGRAM_KERNEL forces a backend ("c" or "python").
Both backends expose the integer-mask interface of ``_pykernel.PairTable``;
the compiled one is wrapped here to convert masks at the boundary.
"""

from __future__ import annotations

import os

from ._pykernel import PairTable as PyPairTable

try:  # the compiled extension is optional
    from . import _ckernel

    HAVE_C_KERNEL = True
except ImportError:  # pragma: no cover - build-environment dependent
    _ckernel = None
    HAVE_C_KERNEL = False

# Below this input length the conversion overhead outweighs the C loop.
_C_KERNEL_MIN_LENGTH = 24


class CPairTable:
    backend_name = "c"

    def __init__(self, n: int, words: int):
        self._inner = _ckernel.PairTable(n, words)
        self._bytes = words * 8

    def finalize(self, i: int, j: int, left_mask: int, right_mask: int) -> None:
        nb = self._bytes
        self._inner.finalize(i, j, left_mask.to_bytes(nb, "little"), right_mask.to_bytes(nb, "little"))

    def pair_satisfaction(self, i: int, j: int) -> int:
        return int.from_bytes(self._inner.pair_satisfaction(i, j), "little")


def available_backends() -> tuple[str, ...]:
    return ("python", "c") if HAVE_C_KERNEL else ("python",)


def make_pair_table(n: int, words: int, backend: str = "auto"):
    forced = os.environ.get("BOOLGRAM_KERNEL")
    if backend == "auto" and forced:
        backend = forced
    if backend == "auto":
        backend = "c" if (HAVE_C_KERNEL and n >= _C_KERNEL_MIN_LENGTH) else "python"
    if backend in ("python", "py"):
        return PyPairTable(n, max(words, 1))
    if backend == "c":
        if not HAVE_C_KERNEL:
            raise RuntimeError("compiled kernel requested but not built")
        return CPairTable(n, max(words, 1))
    raise ValueError(f"unknown kernel backend {backend!r}")
