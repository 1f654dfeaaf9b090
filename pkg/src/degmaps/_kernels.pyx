# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels; same contract as ``_kernels_py``.

Window mode works in int64; the caller guarantees no overflow.  Residue mode
reduces every product mod the test modulus, which all clause moduli divide.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free


cdef inline int64_t _pmod(int64_t a, int64_t m) nogil:
    cdef int64_t r = a % m
    return r + m if r < 0 else r


cdef int64_t _eval(int64_t* c, int64_t* e, int t, int n, int64_t* x) nogil:
    cdef int64_t total = 0, term
    cdef int i, j, k
    for i in range(t):
        term = c[i]
        for j in range(n):
            for k in range(e[i * n + j]):
                term *= x[j]
        total += term
    return total


cdef int64_t _eval_mod(int64_t* c, int64_t* e, int t, int n, int64_t* x, int64_t m) nogil:
    cdef int64_t total = 0, term
    cdef int i, j, k
    for i in range(t):
        term = _pmod(c[i], m)
        for j in range(n):
            for k in range(e[i * n + j]):
                term = (term * x[j]) % m
        total = (total + term) % m
    return total


cdef class _Packed:
    cdef int64_t* c
    cdef int64_t* e
    cdef int t
    cdef int n
    cdef int64_t m

    def __cinit__(self, coeffs, exps, int n, int64_t m=0):
        cdef int i
        self.t = len(coeffs)
        self.n = n
        self.m = m
        self.c = <int64_t*> malloc(max(self.t, 1) * sizeof(int64_t))
        self.e = <int64_t*> malloc(max(self.t * n, 1) * sizeof(int64_t))
        for i in range(self.t):
            self.c[i] = coeffs[i]
        for i in range(self.t * n):
            self.e[i] = exps[i]

    def __dealloc__(self):
        free(self.c)
        free(self.e)


def _pack(coeffs, exps, clauses, int n):
    return _Packed(coeffs, exps, n), [_Packed(cc, ce, n, m) for cc, ce, m in clauses]


def window_values(coeffs, exps, clauses, lo, hi, int64_t d):
    cdef int n = len(lo)
    cdef _Packed p, q
    p, qs = _pack(coeffs, exps, clauses, n)
    cdef int nq = len(qs)
    cdef int64_t* x = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t* a = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t* b = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef int i, j, ok
    cdef int64_t v
    cdef char* seen = <char*> malloc(2 * d + 1)
    for i in range(2 * d + 1):
        seen[i] = 0
    for i in range(n):
        a[i] = lo[i]
        b[i] = hi[i]
        x[i] = a[i]
    try:
        for i in range(n):
            if a[i] > b[i]:
                return []
        while True:
            ok = 1
            for j in range(nq):
                q = qs[j]
                v = _eval(q.c, q.e, q.t, n, x)
                if (v != 0) if q.m == 0 else (v % q.m != 0):
                    ok = 0
                    break
            if ok:
                v = _eval(p.c, p.e, p.t, n, x)
                if -d <= v <= d:
                    seen[v + d] = 1
            # odometer step
            i = n - 1
            while i >= 0:
                if x[i] < b[i]:
                    x[i] += 1
                    break
                x[i] = a[i]
                i -= 1
            if i < 0:
                break
        return [int(v - d) for v in range(2 * d + 1) if seen[v]]
    finally:
        free(x)
        free(a)
        free(b)
        free(seen)


def residue_values(coeffs, exps, clauses, sizes, int64_t modulus):
    cdef int n = len(sizes)
    cdef _Packed p, q
    p, qs = _pack(coeffs, exps, clauses, n)
    cdef int nq = len(qs)
    cdef int64_t* x = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef int64_t* s = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef char* seen = <char*> malloc(modulus)
    cdef int i, j, ok
    cdef int64_t v
    for i in range(modulus):
        seen[i] = 0
    for i in range(n):
        s[i] = sizes[i]
        x[i] = 0
    try:
        for i in range(n):
            if s[i] <= 0:
                return []
        while True:
            ok = 1
            for j in range(nq):
                q = qs[j]
                if _eval_mod(q.c, q.e, q.t, n, x, modulus) % q.m != 0:
                    ok = 0
                    break
            if ok:
                seen[_eval_mod(p.c, p.e, p.t, n, x, modulus)] = 1
            i = n - 1
            while i >= 0:
                if x[i] < s[i] - 1:
                    x[i] += 1
                    break
                x[i] = 0
                i -= 1
            if i < 0:
                break
        return [v for v in range(modulus) if seen[v]]
    finally:
        free(x)
        free(s)
        free(seen)
