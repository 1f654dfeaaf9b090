"""Cell structures of the three 8-manifolds and degree bookkeeping.

Each closed manifold here is a CW complex with one cell in each of the
dimensions 0, 3, 5, 8.  The 5-skeleton is either the wedge S3 v S5 or the
complex HALF = S3 u_eta D5; the 8-cell is attached by ``top_attach``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .catalog import Catalog, CatalogError
from .poly import Poly
from .symcalc import MapExpr, expr_from_json

MANIFOLDS = ("S3xS5", "M01", "SU3")


class UnsupportedPair(ValueError):
    pass


@dataclass(frozen=True)
class Wedge:
    cells: tuple[int, ...]
    id: str = "S3vS5"


@dataclass(frozen=True)
class Complex:
    bottom: int
    attach: str  # generator key of the mid-cell attaching map
    cell: int
    id: str = "HALF"


@dataclass(frozen=True)
class SelfClass:
    key: str
    h3: int
    h5: int
    restriction: str | None = None


@dataclass(frozen=True)
class SpaceSpec:
    id: str
    skeleton: Wedge | Complex
    top_attach: MapExpr | None
    h3: int = 1
    h5: int = 1
    orientation: str = "e3*e5 = omega"
    factors: tuple[str, ...] = ()
    self_classes: tuple[SelfClass, ...] = ()
    citation: str = ""

    @property
    def skeleton_id(self) -> str:
        return self.skeleton.id

    @property
    def is_wedge(self) -> bool:
        return isinstance(self.skeleton, Wedge)

    @property
    def is_product(self) -> bool:
        return bool(self.factors)

    def inclusion(self, n: int) -> str:
        """Generator key of the bottom-cell inclusion S^n -> this space."""
        return f"iota_{n}@{self.id}"


def _skeleton(raw: dict) -> Wedge | Complex:
    if raw["kind"] == "wedge":
        return Wedge(tuple(raw["cells"]), raw.get("id", "S3vS5"))
    if raw["kind"] == "complex":
        return Complex(raw["bottom"], raw["attach"], raw["cell"], raw.get("id", "HALF"))
    raise CatalogError(f"unknown skeleton kind {raw['kind']!r}")


def space_spec(cat: Catalog, space_id: str) -> SpaceSpec:
    try:
        raw = cat.spaces[space_id]
    except KeyError:
        raise UnsupportedPair(f"space {space_id!r} is not described in the catalog") from None
    hw = cat.hurewicz.get(space_id, {})
    top = raw.get("top_attach")
    selfs = tuple(
        SelfClass(key, int(v["h3"]), int(v["h5"]), v.get("restriction"))
        for key, v in raw.get("self_classes", {}).items()
    )
    return SpaceSpec(
        id=space_id,
        skeleton=_skeleton(raw["skeleton"]),
        top_attach=expr_from_json(top) if top is not None else None,
        h3=int(hw.get("h3", 1)),
        h5=int(hw.get("h5", 1)),
        orientation=raw.get("orientation", "e3*e5 = omega"),
        factors=tuple(raw.get("factors", ())),
        self_classes=selfs,
        citation=raw.get("citation", ""),
    )


def load_spaces(cat: Catalog) -> dict[str, SpaceSpec]:
    return {sid: space_spec(cat, sid) for sid in MANIFOLDS}


@dataclass(frozen=True)
class Component:
    """One summand ``coeff * meaning`` of a skeleton class.

    ``w3`` and ``w5`` are the multipliers by which one unit of this summand
    acts on H^3 and H^5 of the target (Hurewicz factors already included).
    """

    coeff: Poly
    meaning: str
    w3: int = 0
    w5: int = 0
    torsion: bool = False


@dataclass(frozen=True)
class Pullback:
    h3: Poly
    h5: Poly
    notes: tuple[str, ...] = field(default=())

    @property
    def degree(self) -> Poly:
        return self.h3 * self.h5


SUPPORTED_SHAPES = {
    ("wedge", "S3xS5"),
    ("wedge", "M01"),
    ("wedge", "SU3"),
    ("complex", "S3xS5"),
    ("complex", "M01"),
    ("complex", "SU3"),
}


def pullback(domain: SpaceSpec, target: SpaceSpec, components: Iterable[Component]) -> Pullback:
    shape = ("wedge" if domain.is_wedge else "complex", target.id)
    if shape not in SUPPORTED_SHAPES:
        raise UnsupportedPair(f"no degree bookkeeping for {domain.id} -> {target.id}")
    h3, h5 = Poly(), Poly()
    for c in components:
        if c.torsion:
            continue  # torsion summands act trivially on integral cohomology
        h3 = h3 + c.coeff * c.w3
        h5 = h5 + c.coeff * c.w5
    return Pullback(h3, h5)


def degree_polynomial(domain: SpaceSpec, target: SpaceSpec, components: Iterable[Component]) -> Poly:
    """Degree of any extension of the skeleton class, as a polynomial.

    >>> from degmaps.catalog import load_catalog
    >>> cat = load_catalog()
    >>> s = space_spec(cat, "S3xS5")
    >>> k, l = Poly.var("k"), Poly.var("l")
    >>> str(degree_polynomial(s, space_spec(cat, "SU3"),
    ...     [Component(k, "iota_3", w3=1), Component(l, "iota_5", w5=2)]))
    '2*k*l'
    """
    return pullback(domain, target, components).degree
