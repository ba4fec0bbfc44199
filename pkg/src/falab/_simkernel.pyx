# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled byte-stream stepping kernel.

Same contract as ``_simkernel_py``: per-cycle sorted active-state tuples
plus an operation counter.  The program here is CSR-shaped: for state s
and byte b, the closed successor states are
``targets[offsets[s * 256 + b] : offsets[s * 256 + b + 1]]``.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc
from libc.string cimport memset


def build_program(int n, int[::1] offsets, int[::1] targets,
                  int[::1] init, int[::1] always):
    return (n, offsets, targets, init, always)


def step_stream(program, const unsigned char[::1] data):
    cdef int n = program[0]
    cdef int[::1] offsets = program[1]
    cdef int[::1] targets = program[2]
    cdef int[::1] init = program[3]
    cdef int[::1] always = program[4]

    cdef Py_ssize_t cycles = data.shape[0]
    cdef Py_ssize_t t, j, k
    cdef int m_cur, m_nxt, s, tgt, base
    cdef int n_always = always.shape[0]
    cdef long long work = 0
    cdef list out = []

    if n == 0:
        return [tuple()] * cycles, 0

    cdef unsigned char* flags = <unsigned char*> PyMem_Malloc(n)
    cdef int* cur = <int*> PyMem_Malloc(n * sizeof(int))
    cdef int* nxt = <int*> PyMem_Malloc(n * sizeof(int))
    if flags == NULL or cur == NULL or nxt == NULL:
        PyMem_Free(flags); PyMem_Free(cur); PyMem_Free(nxt)
        raise MemoryError()
    memset(flags, 0, n)

    m_cur = init.shape[0]
    for j in range(m_cur):
        cur[j] = init[j]

    try:
        for t in range(cycles):
            m_nxt = 0
            for j in range(m_cur):
                base = cur[j] * 256 + data[t]
                for k in range(offsets[base], offsets[base + 1]):
                    tgt = targets[k]
                    work += 1
                    if not flags[tgt]:
                        flags[tgt] = 1
                        nxt[m_nxt] = tgt
                        m_nxt += 1
            work += n_always
            for j in range(n_always):
                tgt = always[j]
                if not flags[tgt]:
                    flags[tgt] = 1
                    nxt[m_nxt] = tgt
                    m_nxt += 1
            _insertion_sort(nxt, m_nxt)
            out.append(tuple([nxt[j] for j in range(m_nxt)]))
            for j in range(m_nxt):
                flags[nxt[j]] = 0
            cur, nxt = nxt, cur
            m_cur = m_nxt
    finally:
        PyMem_Free(flags)
        PyMem_Free(cur)
        PyMem_Free(nxt)
    return out, work


cdef inline void _insertion_sort(int* a, int m) noexcept:
    cdef int i, j, v
    for i in range(1, m):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v
