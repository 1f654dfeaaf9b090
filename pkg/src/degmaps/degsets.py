"""Degree sets as finite unions of arithmetic progressions.

>>> str(canonicalize([(0, 4), (1, 2)]))
'4Z ∪ (1+2Z)'
>>> canonicalize([(0, 4), (1, 2)]).to_json()
{'lcm': 4, 'residues': [0, 1, 3]}
>>> canonicalize([(0, 2), (1, 2)]) == canonicalize([(0, 1)])
True
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import kernels
from .abelian import Congruence, CongruenceCondition
from .poly import BINARY_VARS, VARS, Poly

BASE_MODULUS = 24
MAX_MODULUS = 720


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class DegreeSet:
    """``{x : x mod lcm in residues} ∪ points`` in canonical form.

    ``lcm`` is the least period of the progression part.  ``points`` holds
    finitely many values outside it (only needed for constant degree
    polynomials such as the constant 0).  The empty set has no residues and
    no points.
    """

    lcm: int = 1
    residues: tuple[int, ...] = ()
    points: frozenset[int] = frozenset()

    resolved = True

    # construction ---------------------------------------------------------

    @classmethod
    def from_residues(cls, modulus: int, residues: Iterable[int], points: Iterable[int] = ()) -> "DegreeSet":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        res = sorted({r % modulus for r in residues})
        if not res:
            return cls(1, (), frozenset(points))
        L = modulus
        for d in _divisors(modulus):
            if all(((r + d) % modulus) in res for r in res):
                L = d
                break
        res_l = tuple(sorted({r % L for r in res}))
        pts = frozenset(p for p in points if p % L not in res_l)
        return cls(L, res_l, pts)

    @classmethod
    def integers(cls) -> "DegreeSet":
        return cls(1, (0,))

    @classmethod
    def empty(cls) -> "DegreeSet":
        return cls()

    @classmethod
    def finite(cls, values: Iterable[int]) -> "DegreeSet":
        return cls(1, (), frozenset(values))

    @classmethod
    def from_json(cls, obj: Mapping) -> "DegreeSet":
        return cls.from_residues(int(obj["lcm"]), obj.get("residues", ()), obj.get("points", ()))

    @classmethod
    def parse(cls, text: str) -> "DegreeSet":
        """Inverse of ``str``: ``"4Z ∪ (1+2Z)"``, ``"{0}"``, ``"∅"``."""
        text = text.strip()
        if text in ("∅", "{}"):
            return cls.empty()
        progs, pts = [], []
        for part in text.split("∪"):
            part = part.strip()
            if part.startswith("{"):
                pts.extend(int(v) for v in part.strip("{}").split(",") if v.strip())
                continue
            part = part.strip("()")
            a, _, rest = part.rpartition("+") if "+" in part else ("0", "", part)
            d = rest.rstrip("Z") or "1"
            progs.append((int(a), int(d)))
        return canonicalize(progs, pts)

    # queries --------------------------------------------------------------

    def __contains__(self, x: int) -> bool:
        return (bool(self.residues) and x % self.lcm in self.residues) or x in self.points

    def is_empty(self) -> bool:
        return not self.residues and not self.points

    def is_full(self) -> bool:
        return self.lcm == 1 and self.residues == (0,)

    def is_finite(self) -> bool:
        return not self.residues

    def window(self, d: int) -> set[int]:
        return {x for x in range(-d, d + 1) if x in self}

    def refine(self, factor: int) -> tuple[int, tuple[int, ...]]:
        """Residues with respect to ``factor * lcm`` (a non-canonical view)."""
        m = self.lcm * factor
        return m, tuple(r for r in range(m) if r % self.lcm in self.residues)

    def progressions(self) -> list[tuple[int, int]]:
        """A short cover of the residues by progressions ``(a, d)``, ``d | lcm``."""
        left = set(self.residues)
        out = []
        for d in _divisors(self.lcm):
            for a in range(d):
                cls_ = {r for r in range(a, self.lcm, d)}
                if cls_ <= set(self.residues) and cls_ & left:
                    out.append((a, d))
                    left -= cls_
        return sorted(out, key=lambda p: (p[0] != 0, p[1], p[0]))

    def union(self, other: "DegreeSet") -> "DegreeSet":
        m = math.lcm(self.lcm, other.lcm)
        res = [r for r in range(m) if (self.residues and r % self.lcm in self.residues)
               or (other.residues and r % other.lcm in other.residues)]
        return DegreeSet.from_residues(m, res, self.points | other.points)

    __or__ = union

    # rendering ------------------------------------------------------------

    def __str__(self) -> str:
        if self.is_empty():
            return "∅"
        parts = []
        if self.points:
            parts.append("{" + ", ".join(str(p) for p in sorted(self.points)) + "}")
        for a, d in self.progressions():
            mod = "Z" if d == 1 else f"{d}Z"
            parts.append(mod if a == 0 else f"({a}+{mod})")
        return " ∪ ".join(parts)

    def to_json(self) -> dict:
        out: dict = {"lcm": self.lcm, "residues": list(self.residues)}
        if self.points:
            out["points"] = sorted(self.points)
        return out


def canonicalize(progressions: Iterable[tuple[int, int]], points: Iterable[int] = ()) -> DegreeSet:
    """Canonical DegreeSet of a union of progressions ``a + dZ`` and points."""
    progs = [(a, d) for a, d in progressions]
    for _, d in progs:
        if d < 1:
            raise ValueError(f"progression modulus must be >= 1, got {d}")
    if not progs:
        return DegreeSet.finite(points)
    m = math.lcm(*(d for _, d in progs))
    res = {r for a, d in progs for r in range(a % d, m, d)}
    return DegreeSet.from_residues(m, res, points)


# image sets ---------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A parameter line ``x0 + t*v`` along which ``P = value + slope*t``."""

    base: tuple[tuple[str, int], ...]
    direction: tuple[tuple[str, int], ...]
    value: int
    slope: int

    def __str__(self) -> str:
        line = ", ".join(
            f"{n}={b}" + (f"{'+' if v > 0 else '-'}{abs(v) if abs(v) != 1 else ''}t" if v else "")
            for (n, b), (_, v) in zip(self.base, self.direction)
        )
        return f"{line}: {self.value}{'+' if self.slope >= 0 else '-'}{abs(self.slope)}t"


@dataclass(frozen=True)
class Unresolved:
    """The synthesis could not be verified; carries the conjecture and the evidence."""

    conjecture: DegreeSet
    reason: str
    evidence: tuple = ()

    resolved = False

    def __str__(self) -> str:
        return f"unresolved (conjecture {self.conjecture}: {self.reason})"

    def to_json(self) -> dict:
        return {"unresolved": True, "conjecture": self.conjecture.to_json(), "reason": self.reason}


@dataclass
class ImageReport:
    result: DegreeSet | Unresolved
    modulus: int
    residues: tuple[int, ...]
    witnesses: list[Witness] = field(default_factory=list)
    variables: tuple[str, ...] = ()


def _variables(p: Poly, cond: CongruenceCondition) -> tuple[str, ...]:
    used = set(p.variables()) | set(cond.variables())
    return tuple(v for v in VARS if v in used)


def probe_modulus(cond: CongruenceCondition) -> int:
    m = math.lcm(BASE_MODULUS, *(c for c in cond.moduli() if c))
    if m > MAX_MODULUS:
        raise ValueError(f"test modulus {m} exceeds {MAX_MODULUS}")
    return m


def _line_ok(p: Poly, cond: CongruenceCondition, names, base, direction) -> tuple[int, int] | None:
    """(value, slope) if P is affine along the line and C holds on all of it."""
    deg = max(p.degree(), 1)

    def at(t):
        return {n: b + t * v for n, b, v in zip(names, base, direction)}

    vals = [p.evaluate(at(t)) for t in range(deg + 1)]
    # affine iff all higher forward differences vanish
    diffs = vals
    for order in range(deg):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        if order >= 1 and any(diffs):
            return None
    slope = vals[1] - vals[0]
    for c in cond.clauses:
        if c.modulus == 0:
            if any(c.poly.evaluate(at(t)) for t in range(c.poly.degree() + 1)):
                return None
        elif any(c.poly.evaluate(at(t)) % c.modulus for t in range(c.modulus)):
            return None
    return vals[0], slope


def _search_witnesses(p, cond, names, res: DegreeSet, radius: int = 4) -> tuple[list[Witness], set[int]]:
    L = res.lcm
    left = set(res.residues)
    found: list[Witness] = []
    free = [n for n in names if n not in BINARY_VARS]
    base_ranges = [range(2) if n in BINARY_VARS else range(-radius, radius + 1) for n in names]
    dirs = sorted(
        (v for v in product(range(-radius, radius + 1), repeat=len(free)) if any(v)),
        key=lambda v: (sum(map(abs, v)), v),
    )
    bases = sorted(product(*base_ranges), key=lambda b: (sum(map(abs, b)), b))
    for dv in dirs:
        full = dict(zip(free, dv))
        direction = tuple(full.get(n, 0) for n in names)
        for base in bases:
            hit = _line_ok(p, cond, names, base, direction)
            if hit is None:
                continue
            value, slope = hit
            if slope == 0 or L % slope:
                continue
            covered = {r % L for r in range(value, value + L, abs(slope))}
            if not covered <= set(res.residues) or not covered & left:
                continue
            found.append(Witness(tuple(zip(names, base)), tuple(zip(names, direction)), value, slope))
            left -= covered
            if not left:
                return found, left
    return found, left


def image_report(p: Poly | int | str, cond: CongruenceCondition | None = None) -> ImageReport:
    p = Poly.coerce(p)
    cond = cond or CongruenceCondition.true()
    names = _variables(p, cond)
    if any(c.modulus == 0 for c in cond.clauses):
        return ImageReport(Unresolved(DegreeSet.empty(), "exact equality constraints are not supported"), 0, ())
    M = probe_modulus(cond)
    sizes = [2 if n in BINARY_VARS else M for n in names]
    residues = tuple(kernels.residue_values(p, cond, names, sizes, M))
    if not residues:
        return ImageReport(DegreeSet.empty(), M, residues, [], names)
    if p.is_constant():
        return ImageReport(DegreeSet.finite([p.constant()]), M, residues, [], names)
    conj = DegreeSet.from_residues(M, residues)
    wit, missing = _search_witnesses(p, cond, names, conj)
    if missing:
        result: DegreeSet | Unresolved = Unresolved(
            conj, f"no witness line for residues {sorted(missing)} mod {conj.lcm}", tuple(wit)
        )
    else:
        result = conj
    return ImageReport(result, M, residues, wit, names)


def image_set(p: Poly | int | str, cond: CongruenceCondition | None = None) -> DegreeSet | Unresolved:
    """``{P(x) : C(x)}`` as a DegreeSet, or Unresolved.

    Residues of P modulo the test modulus are enumerated exactly, which bounds
    the image from above; every residue class is then realized by an explicit
    parameter line, which bounds it from below.

    >>> k, l = Poly.var("k"), Poly.var("l")
    >>> str(image_set(k * (k + 2 * l)))
    '4Z ∪ (1+2Z)'
    >>> str(image_set(k * l, condition([(k * l, 2)])))
    '2Z'
    >>> str(image_set(0))
    '{0}'
    """
    return image_report(p, cond).result


def condition(clauses: Sequence[tuple[Poly | int | str, int]]) -> CongruenceCondition:
    return CongruenceCondition.of(Congruence(Poly.coerce(q), m) for q, m in clauses)


def brute_force_oracle(
    p: Poly | int | str,
    cond: CongruenceCondition | None,
    bound: int,
    window: int,
    impl=None,
) -> set[int]:
    """All values of P in ``[-window, window]`` over parameters in ``[-bound, bound]``.

    The binary parameter eps only takes the values 0 and 1.
    """
    if bound <= 0 or window < 0:
        raise ValueError("bound must be positive and window non-negative")
    p = Poly.coerce(p)
    cond = cond or CongruenceCondition.true()
    names = _variables(p, cond)
    lo = [0 if n in BINARY_VARS else -bound for n in names]
    hi = [1 if n in BINARY_VARS else bound for n in names]
    return set(kernels.window_values(p, cond, names, lo, hi, window, impl=impl))
