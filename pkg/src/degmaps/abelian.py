"""Finitely generated abelian groups in cyclic-factor coordinates.

Coefficients are :class:`~degmaps.poly.Poly` values; a torsion coordinate of
order ``n`` keeps its polynomial with every coefficient reduced into
``[0, n)`` rather than evaluating it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .poly import Poly


class HomomorphismError(ValueError):
    """A generator image does not respect the order of its generator."""


@dataclass(frozen=True)
class Factor:
    label: str
    order: int  # 0 means infinite cyclic

    def __str__(self) -> str:
        return f"Z{{{self.label}}}" if self.order == 0 else f"Z{self.order}{{{self.label}}}"


@dataclass(frozen=True)
class GroupPresentation:
    name: str
    factors: tuple[Factor, ...] = ()

    def __post_init__(self):
        labels = [f.label for f in self.factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"{self.name}: duplicate generator labels {labels}")
        for f in self.factors:
            if f.order < 0 or f.order == 1:
                raise ValueError(f"{self.name}: order of {f.label} must be 0 or >= 2")

    @classmethod
    def of(cls, name: str, factors: Iterable[tuple[str, int]]) -> "GroupPresentation":
        return cls(name, tuple(Factor(label, order) for label, order in factors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f.label for f in self.factors)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(f.order for f in self.factors)

    def is_trivial(self) -> bool:
        return not self.factors

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not a generator of {self.name}") from None

    def exponent(self) -> int:
        """Least common multiple of the torsion orders (1 for a free group)."""
        from math import lcm

        return lcm(1, *(o for o in self.orders if o))

    def zero(self) -> "GroupElement":
        return GroupElement(self, tuple(Poly() for _ in self.factors))

    def basis(self, label: str) -> "GroupElement":
        return self.element({label: 1})

    def element(self, coeffs: Mapping[str, Poly | int | str]) -> "GroupElement":
        vec = [Poly() for _ in self.factors]
        for label, c in coeffs.items():
            vec[self.index(label)] = vec[self.index(label)] + Poly.coerce(c)
        return reduce(GroupElement(self, tuple(vec)))

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return " + ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class GroupElement:
    presentation: GroupPresentation
    coeffs: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.presentation.factors):
            raise ValueError(
                f"{self.presentation.name}: expected {len(self.presentation.factors)} "
                f"coefficients, got {len(self.coeffs)}"
            )

    def _check(self, other: "GroupElement") -> None:
        if other.presentation != self.presentation:
            raise ValueError(
                f"cannot combine elements of {self.presentation.name} and "
                f"{other.presentation.name}"
            )

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return reduce(
            GroupElement(self.presentation, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        )

    def __neg__(self) -> "GroupElement":
        return reduce(GroupElement(self.presentation, tuple(-c for c in self.coeffs)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def scale(self, c) -> "GroupElement":
        c = Poly.coerce(c)
        return reduce(GroupElement(self.presentation, tuple(c * x for x in self.coeffs)))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in reduce(self).coeffs)

    def coefficient(self, label: str) -> Poly:
        return self.coeffs[self.presentation.index(label)]

    def items(self) -> list[tuple[str, Poly]]:
        return [(f.label, c) for f, c in zip(self.presentation.factors, self.coeffs) if not c.is_zero()]

    def instantiate(self, values: Mapping[str, int]) -> "GroupElement":
        return reduce(
            GroupElement(
                self.presentation,
                tuple(Poly.const(c.evaluate(values)) for c in self.coeffs),
            )
        )

    def __str__(self) -> str:
        parts = []
        for label, c in self.items():
            if c == 1:
                parts.append(label)
            elif c.needs_parens():
                parts.append(f"({c})*{label}")
            else:
                parts.append(f"{c}*{label}")
        return " + ".join(parts) if parts else "0"


def reduce(e: GroupElement) -> GroupElement:
    """Canonical representative: torsion coordinates reduced mod their order."""
    coeffs = tuple(c.mod(f.order) for f, c in zip(e.presentation.factors, e.coeffs))
    if coeffs == e.coeffs:
        return e
    return GroupElement(e.presentation, coeffs)


@dataclass(frozen=True)
class Congruence:
    """``poly ≡ 0 (mod modulus)``; modulus 0 means exact equality ``poly = 0``."""

    poly: Poly
    modulus: int

    def holds(self, values: Mapping[str, int]) -> bool:
        v = self.poly.evaluate(values)
        return v == 0 if self.modulus == 0 else v % self.modulus == 0

    def is_trivial(self) -> bool:
        return self.poly.mod(self.modulus).is_zero() or self.modulus == 1

    def __str__(self) -> str:
        if self.modulus == 0:
            return f"{self.poly} = 0"
        return f"{self.poly} ≡ 0 (mod {self.modulus})"

    def to_json(self) -> dict:
        return {"poly": str(self.poly), "modulus": self.modulus}


@dataclass(frozen=True)
class CongruenceCondition:
    """A conjunction of congruences; the empty conjunction is ``true``."""

    clauses: tuple[Congruence, ...] = ()

    @classmethod
    def of(cls, clauses: Iterable[Congruence]) -> "CongruenceCondition":
        kept = []
        for c in clauses:
            c = Congruence(c.poly.mod(c.modulus), c.modulus)
            if not c.is_trivial() and c not in kept:
                kept.append(c)
        return cls(tuple(kept))

    @classmethod
    def true(cls) -> "CongruenceCondition":
        return cls()

    def is_true(self) -> bool:
        return not self.clauses

    def holds(self, values: Mapping[str, int]) -> bool:
        return all(c.holds(values) for c in self.clauses)

    def __and__(self, other: "CongruenceCondition") -> "CongruenceCondition":
        return CongruenceCondition.of(self.clauses + other.clauses)

    def moduli(self) -> tuple[int, ...]:
        return tuple(c.modulus for c in self.clauses)

    def variables(self) -> tuple[str, ...]:
        names = set()
        for c in self.clauses:
            names.update(c.poly.variables())
        return tuple(sorted(names))

    def substitute(self, values: Mapping[str, Poly | int]) -> "CongruenceCondition":
        return CongruenceCondition.of(Congruence(c.poly.subs(values), c.modulus) for c in self.clauses)

    def __str__(self) -> str:
        return " and ".join(str(c) for c in self.clauses) if self.clauses else "true"

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.clauses]


def is_zero_condition(e: GroupElement) -> CongruenceCondition:
    """Exact condition on the parameters under which ``e`` vanishes."""
    e = reduce(e)
    return CongruenceCondition.of(
        Congruence(c, f.order) for f, c in zip(e.presentation.factors, e.coeffs) if not c.is_zero()
    )


@dataclass(frozen=True)
class Homomorphism:
    source: GroupPresentation
    target: GroupPresentation
    images: tuple[GroupElement, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source.factors):
            raise HomomorphismError(f"{self.source.name}: one image per generator required")
        for f, img in zip(self.source.factors, self.images):
            if img.presentation != self.target:
                raise HomomorphismError(f"image of {f.label} is not in {self.target.name}")
            if f.order and not img.scale(f.order).is_zero():
                raise HomomorphismError(
                    f"{f.label} has order {f.order} but {f.order}*({img}) != 0 in {self.target.name}"
                )

    @classmethod
    def from_labels(
        cls,
        source: GroupPresentation,
        target: GroupPresentation,
        images: Mapping[str, Mapping[str, int | Poly]],
    ) -> "Homomorphism":
        vec = tuple(target.element(images.get(label, {})) for label in source.labels)
        return cls(source, target, vec)

    @classmethod
    def identity(cls, group: GroupPresentation) -> "Homomorphism":
        return cls(group, group, tuple(group.basis(lbl) for lbl in group.labels))


def hom_apply(h: Homomorphism, e: GroupElement) -> GroupElement:
    if e.presentation != h.source:
        raise ValueError(f"{e.presentation.name} is not the source {h.source.name}")
    total = h.target.zero()
    for c, img in zip(e.coeffs, h.images):
        if not c.is_zero():
            total = total + img.scale(c)
    return reduce(total)


def element_from_vector(group: GroupPresentation, vec: Sequence[Poly | int]) -> GroupElement:
    return reduce(GroupElement(group, tuple(Poly.coerce(v) for v in vec)))
