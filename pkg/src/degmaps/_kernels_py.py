"""Pure-Python enumeration kernels (reference implementation).

A polynomial is passed in packed form: ``coeffs`` (length T) and ``exps``
(flat, length T*n, row-major) over ``n`` variables.  A condition is a list of
``(coeffs, exps, modulus)`` triples, all over the same variables.
"""

from __future__ import annotations

from itertools import product


def _eval(coeffs, exps, n, x):
    total = 0
    for t, c in enumerate(coeffs):
        term = c
        base = t * n
        for i in range(n):
            e = exps[base + i]
            if e:
                term *= x[i] ** e
        total += term
    return total


def _ok(clauses, n, x):
    for coeffs, exps, m in clauses:
        v = _eval(coeffs, exps, n, x)
        if (v != 0) if m == 0 else (v % m):
            return False
    return True


def window_values(coeffs, exps, clauses, lo, hi, d):
    """Distinct values P(x) with |P(x)| <= d over the box lo <= x <= hi."""
    n = len(lo)
    out = set()
    for x in product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if clauses and not _ok(clauses, n, x):
            continue
        v = _eval(coeffs, exps, n, x)
        if -d <= v <= d:
            out.add(v)
    return sorted(out)


def residue_values(coeffs, exps, clauses, sizes, modulus):
    """Distinct residues P(x) mod ``modulus`` for 0 <= x_i < sizes[i]."""
    n = len(sizes)
    out = set()
    for x in product(*(range(s) for s in sizes)):
        if clauses and not _ok(clauses, n, x):
            continue
        out.add(_eval(coeffs, exps, n, x) % modulus)
    return sorted(out)
