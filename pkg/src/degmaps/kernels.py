"""Polynomial enumeration kernels with a compiled core when available.

The Cython extension ``degmaps._kernels`` is used if it was built; otherwise,
or when ``DEGMAPS_PURE=1`` is set, the pure-Python module is used instead.
Both expose the same two functions and return identical results.
"""

from __future__ import annotations

import logging
import os
from typing import Sequence

from . import _kernels_py
from .abelian import CongruenceCondition
from .poly import VARS, Poly

log = logging.getLogger(__name__)

PURE_ENV = "DEGMAPS_PURE"
_INT64_SAFE = 2**62


def _select():
    if os.environ.get(PURE_ENV, "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        log.debug("compiled kernels unavailable, using pure Python")
        return _kernels_py, "python"
    return _kernels, "cython"


_impl, BACKEND = _select()


def backend(name: str | None = None):
    """Return the kernel module for ``name`` ("python", "cython") or the default."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def pack(p: Poly, names: Sequence[str]) -> tuple[list[int], list[int]]:
    idx = [VARS.index(v) for v in names]
    coeffs, exps = [], []
    for e, c in p.terms:
        if any(e[i] for i in range(len(VARS)) if i not in idx):
            raise ValueError(f"{p} uses variables outside {list(names)}")
        coeffs.append(c)
        exps.extend(e[i] for i in idx)
    return coeffs, exps


def pack_condition(cond: CongruenceCondition, names: Sequence[str]) -> list[tuple[list[int], list[int], int]]:
    return [(*pack(c.poly, names), c.modulus) for c in cond.clauses]


def _bound(p: Poly, box: int) -> int:
    return sum(abs(c) * box ** sum(e) for e, c in p.terms)


def _fits(p: Poly, cond: CongruenceCondition, box: int) -> bool:
    polys = [p] + [c.poly for c in cond.clauses]
    return all(_bound(q, box) < _INT64_SAFE for q in polys)


def window_values(
    p: Poly,
    cond: CongruenceCondition,
    names: Sequence[str],
    lo: Sequence[int],
    hi: Sequence[int],
    d: int,
    impl=None,
) -> list[int]:
    """Sorted distinct values of ``p`` in ``[-d, d]`` over the box, filtered by ``cond``."""
    impl = impl or _impl
    box = max([1] + [abs(v) for v in (*lo, *hi)])
    if impl is not _kernels_py and not _fits(p, cond, box):
        impl = _kernels_py  # int64 would overflow
    coeffs, exps = pack(p, names)
    return list(impl.window_values(coeffs, exps, pack_condition(cond, names), list(lo), list(hi), d))


def residue_values(
    p: Poly,
    cond: CongruenceCondition,
    names: Sequence[str],
    sizes: Sequence[int],
    modulus: int,
    impl=None,
) -> list[int]:
    """Sorted residues ``p(x) mod modulus`` over ``0 <= x_i < sizes[i]`` satisfying ``cond``.

    Every clause modulus must be nonzero and divide ``modulus``.
    """
    impl = impl or _impl
    for m in cond.moduli():
        if m == 0 or modulus % m:
            raise ValueError(f"clause modulus {m} does not divide {modulus}")
    if impl is not _kernels_py and modulus**2 >= _INT64_SAFE:
        impl = _kernels_py
    coeffs, exps = pack(p, names)
    return list(impl.residue_values(coeffs, exps, pack_condition(cond, names), list(sizes), modulus))
