# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-satisfaction table: the innermost loop of the recognizer.

Same contract as the pure-Python backend in ``_pykernel``, with masks
exchanged as little-endian byte strings of fixed width.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize

import numpy as np


cdef class PairTable:
    cdef unsigned long long[:, ::1] left
    cdef unsigned long long[:, ::1] right
    cdef unsigned long long[::1] acc
    cdef object _left_arr, _right_arr, _acc_arr
    cdef int n, words

    backend_name = "c"

    def __init__(self, int n, int words):
        self.n = n
        self.words = words
        self._left_arr = np.zeros(((n + 1) * (n + 1), words), dtype=np.uint64)
        self._right_arr = np.zeros(((n + 1) * (n + 1), words), dtype=np.uint64)
        self._acc_arr = np.zeros(words, dtype=np.uint64)
        self.left = self._left_arr
        self.right = self._right_arr
        self.acc = self._acc_arr

    def finalize(self, int i, int j, bytes left_mask, bytes right_mask):
        cdef int k = i * (self.n + 1) + j
        self._left_arr[k] = np.frombuffer(left_mask, dtype="<u8")
        self._right_arr[k] = np.frombuffer(right_mask, dtype="<u8")

    def pair_satisfaction(self, int i, int j):
        cdef int words = self.words
        cdef int stride = self.n + 1
        cdef Py_ssize_t mid, t, kl, kr
        cdef unsigned long long[::1] acc = self.acc
        cdef unsigned long long[:, ::1] left = self.left
        cdef unsigned long long[:, ::1] right = self.right
        for t in range(words):
            acc[t] = 0
        with nogil:
            for mid in range(i + 1, j):
                kl = i * stride + mid
                kr = mid * stride + j
                for t in range(words):
                    acc[t] |= left[kl, t] & right[kr, t]
        return PyBytes_FromStringAndSize(<char*>&acc[0], words * 8)
