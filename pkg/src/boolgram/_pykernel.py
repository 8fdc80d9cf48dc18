"""Pure-Python pair-satisfaction table.

Bitsets are plain integers: for each finalized cell (i, j) the table keeps
the union of the left-role masks of the cell's nonterminals (and likewise
right-role), so one AND per split point decides which pair conjuncts that
split satisfies. This is the fallback backend; the compiled one in
``_ckernel`` does the same word operations over preallocated arrays.
"""

from __future__ import annotations


class PairTable:
    backend_name = "python"

    def __init__(self, n: int, words: int):
        self.n = n
        self.words = words
        self.left = [[0] * (n + 1) for _ in range(n + 1)]
        self.right = [[0] * (n + 1) for _ in range(n + 1)]

    def finalize(self, i: int, j: int, left_mask: int, right_mask: int) -> None:
        self.left[i][j] = left_mask
        self.right[i][j] = right_mask

    def pair_satisfaction(self, i: int, j: int) -> int:
        acc = 0
        left_i = self.left[i]
        right = self.right
        for mid in range(i + 1, j):
            acc |= left_i[mid] & right[mid][j]
        return acc
