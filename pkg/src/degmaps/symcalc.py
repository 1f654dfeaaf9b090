"""Expression trees for homotopy classes and a tracing rewrite engine.

An expression denotes a map ``S^n -> X`` (or, for skeleton classes, a map
out of a cell complex).  :meth:`Engine.normalize` rewrites it to a single
element of ``pi_n(X)`` in catalog coordinates and records each rewrite.

Rules are grouped in tiers.  A step always uses the lowest tier that has an
applicable rule somewhere in the tree; within a tier the innermost node
wins, and at one node the first rule in priority order wins.  Catalog
substitution (R7) and torsion reduction (R8) therefore only run once the
structural rules are exhausted.

Rule families:

* ``R1`` post-composition is a homomorphism: ``f(g1 + g2) = fg1 + fg2``.
* ``R2`` pre-composition distributes when the right factor is a suspension.
* ``R3`` ``a o (m iota_n) = m a``.
* ``R4`` Hilton's formula, truncated after the first Whitehead-product term.
* ``R5`` bilinearity of Whitehead products.
* ``R6`` Whitehead products vanish through an H-space.
* ``R7`` catalog substitution for words, Whitehead products and suspensions.
* ``R8`` collecting coordinates and reducing torsion.

plus bookkeeping rules (``unit``, ``assoc``, ``wedge``, ``natural``,
``susp``, ``bind``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping

from .abelian import CongruenceCondition, GroupElement, GroupPresentation, hom_apply, is_zero_condition
from .catalog import Catalog, GeneratorRef, NotInCatalog
from .poly import NonIntegralError, Poly


class EngineError(Exception):
    pass


class TypeMismatch(EngineError):
    pass


class HopfUndeclared(EngineError):
    pass


class HiltonTruncationError(EngineError):
    pass


class NormalizationStuck(EngineError):
    pass


class SuspensionRefused(EngineError):
    pass


# expressions ------------------------------------------------------------------


class MapExpr:
    __slots__ = ()

    def children(self) -> tuple["MapExpr", ...]:
        return ()

    def with_children(self, kids: tuple["MapExpr", ...]) -> "MapExpr":
        return self

    def __add__(self, other: "MapExpr") -> "MapExpr":
        return Sum((self, other))

    def __rmul__(self, c) -> "MapExpr":
        return Scale(Poly.coerce(c), self)

    def __matmul__(self, other: "MapExpr") -> "MapExpr":
        return Compose(self, other)


@dataclass(frozen=True)
class Gen(MapExpr):
    key: str

    def __str__(self) -> str:
        label, _, target = self.key.partition("@")
        return label if _is_sphere(target) else self.key


@dataclass(frozen=True)
class DegreeMap(MapExpr):
    coeff: Poly
    dim: int

    def __str__(self) -> str:
        return f"({self.coeff})iota_{self.dim}"


@dataclass(frozen=True)
class Sum(MapExpr):
    parts: tuple[MapExpr, ...]

    def children(self):
        return self.parts

    def with_children(self, kids):
        return Sum(tuple(kids))

    def __str__(self) -> str:
        return "(" + " + ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Compose(MapExpr):
    left: MapExpr
    right: MapExpr

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return Compose(*kids)

    def __str__(self) -> str:
        return f"{self.left} o {self.right}"


@dataclass(frozen=True)
class Bracket(MapExpr):
    a: MapExpr
    b: MapExpr

    def children(self):
        return (self.a, self.b)

    def with_children(self, kids):
        return Bracket(*kids)

    def __str__(self) -> str:
        return f"[{self.a}, {self.b}]"


@dataclass(frozen=True)
class Suspend(MapExpr):
    e: MapExpr

    def children(self):
        return (self.e,)

    def with_children(self, kids):
        return Suspend(kids[0])

    def __str__(self) -> str:
        return f"S({self.e})"


@dataclass(frozen=True)
class Scale(MapExpr):
    coeff: Poly
    e: MapExpr

    def children(self):
        return (self.e,)

    def with_children(self, kids):
        return Scale(self.coeff, kids[0])

    def __str__(self) -> str:
        c = f"({self.coeff})" if self.coeff.needs_parens() else str(self.coeff)
        inner = str(self.e)
        if isinstance(self.e, Compose):
            inner = f"({inner})"
        return f"{c}*{inner}"


@dataclass(frozen=True)
class Zero(MapExpr):
    source: int | str
    target: str

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Elem(MapExpr):
    """A literal element of ``pi_degree(space)``."""

    element: GroupElement
    space: str
    degree: int

    def __str__(self) -> str:
        return "{" + str(self.element) + "}"


def _is_sphere(space: str) -> bool:
    return space.startswith("S") and space[1:].isdigit()


def _sphere(space: str) -> int:
    return int(space[1:])


def gen(key: str) -> Gen:
    return Gen(key)


def chain(*items: MapExpr | str) -> MapExpr:
    """Right-associated composite ``a o (b o (c ...))``."""
    exprs = [Gen(x) if isinstance(x, str) else x for x in items]
    out = exprs[-1]
    for e in reversed(exprs[:-1]):
        out = Compose(e, out)
    return out


def deg(c, n: int) -> DegreeMap:
    return DegreeMap(Poly.coerce(c), n)


def scale(c, e: MapExpr) -> Scale:
    return Scale(Poly.coerce(c), e)


def expr_from_json(obj: Any) -> MapExpr:
    if isinstance(obj, str):
        return Gen(obj)
    (kind, val), = obj.items()
    if kind == "gen":
        return Gen(val)
    if kind == "deg":
        return deg(val[0], int(val[1]))
    if kind == "sum":
        return Sum(tuple(expr_from_json(v) for v in val))
    if kind == "compose":
        return chain(*(expr_from_json(v) for v in val))
    if kind == "bracket":
        return Bracket(expr_from_json(val[0]), expr_from_json(val[1]))
    if kind == "suspend":
        return Suspend(expr_from_json(val))
    if kind == "scale":
        return scale(val[0], expr_from_json(val[1]))
    if kind == "zero":
        return Zero(val[0], val[1])
    raise ValueError(f"unknown expression kind {kind!r}")


def expr_to_json(e: MapExpr) -> Any:
    if isinstance(e, Gen):
        return {"gen": e.key}
    if isinstance(e, DegreeMap):
        return {"deg": [str(e.coeff), e.dim]}
    if isinstance(e, Sum):
        return {"sum": [expr_to_json(p) for p in e.parts]}
    if isinstance(e, Compose):
        return {"compose": [expr_to_json(e.left), expr_to_json(e.right)]}
    if isinstance(e, Bracket):
        return {"bracket": [expr_to_json(e.a), expr_to_json(e.b)]}
    if isinstance(e, Suspend):
        return {"suspend": expr_to_json(e.e)}
    if isinstance(e, Scale):
        return {"scale": [str(e.coeff), expr_to_json(e.e)]}
    if isinstance(e, Zero):
        return {"zero": [e.source, e.target]}
    if isinstance(e, Elem):
        return {"elem": {"space": e.space, "degree": e.degree,
                         "coeffs": {lbl: str(c) for lbl, c in e.element.items()}}}
    raise TypeError(type(e).__name__)


def walk(e: MapExpr, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], MapExpr, MapExpr | None]]:
    """Post-order traversal yielding ``(path, node, parent)``."""
    stack: list[tuple[tuple[int, ...], MapExpr, MapExpr | None, bool]] = [(path, e, None, False)]
    while stack:
        p, node, parent, expanded = stack.pop()
        if expanded or not node.children():
            yield p, node, parent
            continue
        stack.append((p, node, parent, True))
        for i in reversed(range(len(node.children()))):
            stack.append((p + (i,), node.children()[i], node, False))


def subexpr(e: MapExpr, path: tuple[int, ...]) -> MapExpr:
    for i in path:
        e = e.children()[i]
    return e


def replace_at(e: MapExpr, path: tuple[int, ...], new: MapExpr) -> MapExpr:
    if not path:
        return new
    kids = list(e.children())
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return e.with_children(tuple(kids))


# traces -----------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    rule: str
    path: tuple[int, ...]
    before: MapExpr
    after: MapExpr
    citations: tuple[str, ...] = ()

    @property
    def family(self) -> str:
        return self.rule.split(":")[0]

    def to_record(self) -> dict:
        return {
            "rule": self.rule,
            "path": list(self.path),
            "before": str(self.before),
            "after": str(self.after),
            "citations": list(self.citations),
        }


@dataclass(frozen=True)
class DerivationTrace:
    initial: MapExpr
    steps: tuple[TraceStep, ...]
    result: GroupElement
    space: str
    degree: int
    title: str = ""
    notes: tuple[str, ...] = ()

    @property
    def final(self) -> MapExpr:
        return self.steps[-1].after if self.steps else self.initial

    def rules_used(self) -> set[str]:
        return {s.rule for s in self.steps}

    def families_used(self) -> set[str]:
        return {s.family for s in self.steps}

    def citations(self) -> list[str]:
        seen: list[str] = []
        for s in self.steps:
            for c in s.citations:
                if c not in seen:
                    seen.append(c)
        return seen

    def render_text(self) -> str:
        lines = []
        if self.title:
            lines.append(f"# {self.title}")
        lines.append(f"in pi_{self.degree}({self.space}):")
        lines.append(f"    {self.initial}")
        for i, s in enumerate(self.steps, 1):
            line = f"{i:3d}. [{s.rule}] = {s.after}"
            if s.citations:
                line += "    -- " + "; ".join(s.citations)
            lines.append(line)
        lines.append(f"  => {self.result}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)

    def to_records(self) -> list[dict]:
        head = {"title": self.title, "space": self.space, "degree": self.degree,
                "initial": str(self.initial), "result": str(self.result), "notes": list(self.notes)}
        return [head] + [s.to_record() for s in self.steps]


# engine -----------------------------------------------------------------------

Rule = Callable[["Engine", MapExpr, MapExpr | None], tuple[MapExpr, tuple[str, ...]] | None]


@dataclass
class Engine:
    catalog: Catalog
    bindings: Mapping[tuple[str, str], MapExpr] = field(default_factory=dict)
    local_gens: Mapping[str, GeneratorRef] = field(default_factory=dict)
    binding_citation: str = "skeleton stage"
    max_steps: int = 5000

    def __post_init__(self):
        self._types: dict[MapExpr, tuple[int | str, str]] = {}

    # typing ---------------------------------------------------------------

    def gen_ref(self, key: str) -> GeneratorRef:
        if key in self.local_gens:
            return self.local_gens[key]
        return self.catalog.generator(key)

    def type_of(self, e: MapExpr) -> tuple[int | str, str]:
        """``(source, target)``; source is a sphere dimension or a space id."""
        cached = self._types.get(e)
        if cached is None:
            cached = self._type_of(e)
            self._types[e] = cached
        return cached

    def _type_of(self, e: MapExpr) -> tuple[int | str, str]:
        if isinstance(e, Gen):
            ref = self.gen_ref(e.key)
            return ref.source, ref.target
        if isinstance(e, DegreeMap):
            return e.dim, f"S{e.dim}"
        if isinstance(e, (Scale,)):
            return self.type_of(e.e)
        if isinstance(e, Zero):
            return e.source, e.target
        if isinstance(e, Elem):
            return e.degree, e.space
        if isinstance(e, Sum):
            if not e.parts:
                raise TypeMismatch("empty sum")
            types = [self.type_of(p) for p in e.parts]
            targets = {t for _, t in types}
            if len(targets) != 1:
                raise TypeMismatch(f"sum over different targets {targets}")
            sources = sorted({s for s, _ in types}, key=str)
            if len(sources) == 1:
                return sources[0], types[0][1]
            if not all(isinstance(s, int) for s in sources):
                raise TypeMismatch(f"wedge of non-spheres {sources}")
            return wedge_id(sources), types[0][1]
        if isinstance(e, Compose):
            ls, lt = self.type_of(e.left)
            rs, rt = self.type_of(e.right)
            if not _matches(ls, rt):
                raise TypeMismatch(f"cannot compose {e.left} (from {ls}) after {e.right} (into {rt})")
            return rs, lt
        if isinstance(e, Bracket):
            a_s, a_t = self.type_of(e.a)
            b_s, b_t = self.type_of(e.b)
            if a_t != b_t:
                raise TypeMismatch(f"Whitehead product needs a common target, got {a_t} and {b_t}")
            if not (isinstance(a_s, int) and isinstance(b_s, int)):
                raise TypeMismatch("Whitehead product of non-spherical classes")
            return a_s + b_s - 1, a_t
        if isinstance(e, Suspend):
            s, t = self.type_of(e.e)
            return _suspend_space(self.catalog, s), _suspend_space(self.catalog, t)
        raise TypeMismatch(f"unknown expression {e!r}")

    def is_wedge_map(self, e: MapExpr) -> bool:
        return isinstance(e, Sum) and isinstance(self.type_of(e)[0], str) and "v" in self.type_of(e)[0]

    def is_suspension(self, e: MapExpr) -> bool:
        if isinstance(e, Gen):
            return self.gen_ref(e.key).suspension
        if isinstance(e, (DegreeMap, Suspend, Zero)):
            return True
        if isinstance(e, Compose):
            return self.is_suspension(e.left) and self.is_suspension(e.right)
        if isinstance(e, Scale):
            return self.is_suspension(e.e)
        if isinstance(e, Sum):
            return all(self.is_suspension(p) for p in e.parts)
        return False

    # catalog helpers ------------------------------------------------------

    def basis_expr(self, space: str, n: int, label: str) -> MapExpr:
        entry = self.catalog.group(space, n).entry(label)
        if entry.word is not None:
            return chain(*entry.word)
        return Bracket(Gen(entry.bracket[0]), Gen(entry.bracket[1]))

    def expand_elem(self, e: Elem) -> MapExpr:
        parts = []
        for label, c in e.element.items():
            b = self.basis_expr(e.space, e.degree, label)
            parts.append(b if c == 1 else Scale(c, b))
        if not parts:
            return Zero(e.degree, e.space)
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def hopf(self, a: MapExpr) -> tuple[MapExpr | None, tuple[str, ...]]:
        """Hopf invariant of a spherical class, ``None`` meaning zero."""
        if isinstance(a, Zero):
            return None, ()
        if self.is_suspension(a):
            return None, ("Hopf invariant of a suspension vanishes",)
        if isinstance(a, Gen):
            if a.key in self.catalog.hopf:
                word, cite = self.catalog.hopf[a.key]
                return chain(*word), (cite,)
            raise HopfUndeclared(f"Hopf invariant of {a.key} is not declared")
        if isinstance(a, Compose) and self.is_suspension(a.right) and isinstance(self.type_of(a.left)[0], int):
            h, cites = self.hopf(a.left)
            return (None if h is None else Compose(h, a.right)), cites
        n, space = self.type_of(a)
        if isinstance(n, int) and _is_sphere(space) and n <= 3 * _sphere(space) - 3:
            # H is a homomorphism in the metastable range
            cite = "Hopf invariant is additive for n <= 3m - 3"
            if isinstance(a, Elem):
                return self.hopf(self.expand_elem(a))
            if isinstance(a, Scale):
                h, cites = self.hopf(a.e)
                return (None if h is None else Scale(a.coeff, h)), cites + (cite,)
            if isinstance(a, Sum):
                parts, cites = [], [cite]
                for p in a.parts:
                    h, more = self.hopf(p)
                    cites.extend(more)
                    if h is not None:
                        parts.append(h)
                if not parts:
                    return None, tuple(cites)
                return (parts[0] if len(parts) == 1 else Sum(tuple(parts))), tuple(cites)
            if not isinstance(a, Gen):
                # H only depends on the class: read it off the catalog coordinates
                value, _ = self.normalize(a, space, n)
                h, cites = self.hopf(self.expand_elem(Elem(value, space, n)))
                return h, cites + (cite,)
        raise HopfUndeclared(f"Hopf invariant of {a} is not declared")

    def _check_truncation(self, sphere: int, degree: int | str) -> str:
        entry = self.catalog.hilton_truncation.get(sphere)
        if entry is None or not isinstance(degree, int) or degree > entry[0]:
            raise HiltonTruncationError(
                f"Hilton expansion on S^{sphere} in degree {degree} is not declared truncatable"
            )
        return entry[1]

    @staticmethod
    def _gen_chain(e: MapExpr) -> tuple[str, ...] | None:
        keys = []
        while isinstance(e, Compose) and isinstance(e.left, Gen):
            keys.append(e.left.key)
            e = e.right
        if not isinstance(e, Gen):
            return None
        keys.append(e.key)
        return tuple(keys)

    def resolve_word(self, word: tuple[str, ...], space: str, n: int) -> tuple[GroupElement, tuple[str, ...]]:
        if len(word) > 1:
            kept = tuple(w for w in word if not self.gen_ref(w).is_identity)
            word = kept or word[-1:]
        grp = self.catalog.group(space, n)
        pres = grp.presentation
        if pres.is_trivial():
            return pres.zero(), (f"pi_{n}({space}) = 0: {grp.citation}",)
        label = grp.word_index().get(word)
        if label is not None:
            return pres.basis(label), ()
        if word in self.catalog.composites:
            value, cite = self.catalog.composites[word]
            return pres.element(value), (cite,)
        for i in range(len(word) - 1, 1, -1):
            prefix, rest = word[:i], word[i:]
            if prefix not in self.catalog.composites:
                continue
            if not all(self.gen_ref(g).suspension for g in rest):
                continue
            # (value) o rest, with rest a suspension hence additive
            value, cite = self.catalog.composites[prefix]
            j = self.gen_ref(prefix[-1]).source
            inner = self.catalog.group(space, j)
            out, cites = pres.zero(), [cite]
            for lbl, c in inner.presentation.element(value).items():
                sub = inner.entry(lbl)
                if sub.word is None:
                    break
                part, more = self.resolve_word(sub.word + rest, space, n)
                out = out + part.scale(c)
                cites.extend(more)
            else:
                return out, tuple(cites)
        head = self.gen_ref(word[0])
        if head.kind == "inclusion" and len(word) > 1:
            inner, cites = self.resolve_word(word[1:], f"S{head.source}", n)
            out = pres.zero()
            for lbl, c in inner.items():
                sub = self.catalog.group(f"S{head.source}", n).entry(lbl)
                if sub.word is None:
                    raise NotInCatalog(f"cannot include {lbl} into pi_{n}({space})")
                target_label = grp.word_index().get((word[0],) + sub.word)
                if target_label is None:
                    raise NotInCatalog(f"{(word[0],) + sub.word} is not a basis word of pi_{n}({space})")
                out = out + pres.basis(target_label).scale(c)
            return out, cites
        raise NotInCatalog(f"composite {' o '.join(word)} in pi_{n}({space}) not in catalog")

    def whitehead_value(self, a: str, b: str) -> tuple[Elem, tuple[str, ...]] | None:
        ra, rb = self.gen_ref(a), self.gen_ref(b)
        n, space = ra.source + rb.source - 1, ra.target
        grp = self.catalog.group(space, n)
        pres = grp.presentation
        if pres.is_trivial():
            return Elem(pres.zero(), space, n), (f"pi_{n}({space}) = 0",)
        for (x, y), sign in (((a, b), 1), ((b, a), (-1) ** (ra.source * rb.source))):
            if (x, y) in self.catalog.whitehead:
                value, cite = self.catalog.whitehead[(x, y)]
                return Elem(pres.element(value).scale(sign), space, n), (cite,)
        for entry in grp.basis:
            if entry.bracket == (a, b):
                return Elem(pres.basis(entry.label), space, n), ()
            if entry.bracket == (b, a):
                return Elem(pres.basis(entry.label).scale((-1) ** (ra.source * rb.source)), space, n), ()
        return None

    # stepping -------------------------------------------------------------

    def candidates(self, e: MapExpr) -> Iterator[tuple[int, tuple[int, ...], str, MapExpr, tuple[str, ...]]]:
        """All applicable rewrites as ``(tier, path, rule, replacement, citations)``."""
        for path, node, parent in walk(e):
            for tier, name, fn in RULES:
                out = fn(self, node, parent)
                if out is not None:
                    yield tier, path, name, out[0], out[1]

    def step(self, e: MapExpr) -> tuple[tuple[int, ...], str, MapExpr, tuple[str, ...]] | None:
        nodes = list(walk(e))
        for tier in TIERS:
            for path, node, parent in nodes:
                for t, name, fn in RULES:
                    if t != tier:
                        continue
                    out = fn(self, node, parent)
                    if out is not None:
                        return path, name, out[0], out[1]
        return None

    def apply(self, e: MapExpr, path: tuple[int, ...], rule: str) -> tuple[MapExpr, tuple[str, ...]]:
        node = subexpr(e, path)
        parent = subexpr(e, path[:-1]) if path else None
        out = RULE_BY_NAME[rule](self, node, parent)
        if out is None:
            raise EngineError(f"rule {rule} does not apply at {path}")
        return replace_at(e, path, out[0]), out[1]

    def rewrite(self, e: MapExpr) -> tuple[MapExpr, list[TraceStep]]:
        steps: list[TraceStep] = []
        self.type_of(e)
        for _ in range(self.max_steps):
            found = self.step(e)
            if found is None:
                return e, steps
            path, rule, new, cites = found
            after = replace_at(e, path, new)
            steps.append(TraceStep(rule, path, e, after, cites))
            e = after
        raise NormalizationStuck(f"no fixed point after {self.max_steps} steps")

    def normalize(self, e: MapExpr, space: str, n: int, title: str = "") -> tuple[GroupElement, DerivationTrace]:
        src, tgt = self.type_of(e)
        if (src, tgt) != (n, space):
            raise TypeMismatch(f"{e} is in pi_{src}({tgt}), not pi_{n}({space})")
        grp = self.catalog.group(space, n)
        pres = grp.presentation
        if pres.is_trivial():
            step = TraceStep("vanishing-group", (), e, Zero(n, space), (f"pi_{n}({space}) = 0: {grp.citation}",))
            return pres.zero(), DerivationTrace(e, (step,), pres.zero(), space, n, title)
        final, steps = self.rewrite(e)
        result = self._read_off(final, pres, space, n)
        return result, DerivationTrace(e, tuple(steps), result, space, n, title)

    def _read_off(self, final: MapExpr, pres: GroupPresentation, space: str, n: int) -> GroupElement:
        if isinstance(final, Zero):
            return pres.zero()
        if isinstance(final, Elem) and final.element.presentation == pres:
            return final.element
        raise NormalizationStuck(f"expression did not reach a normal form in pi_{n}({space}): {final}")


def wedge_id(dims) -> str:
    return "v".join(f"S{d}" for d in sorted(dims))


def _matches(source: int | str, target: str) -> bool:
    if isinstance(source, int):
        return target == f"S{source}"
    return source == target


def _suspend_space(cat: Catalog, x: int | str) -> int | str:
    if isinstance(x, int):
        return x + 1
    if _is_sphere(x):
        return f"S{_sphere(x) + 1}"
    spec = cat.spaces.get(x, {})
    if "suspension" not in spec:
        raise TypeMismatch(f"suspension of {x} is not declared")
    return spec["suspension"]


# rules ------------------------------------------------------------------------


def _zero_like(eng: Engine, e: MapExpr) -> Zero:
    s, t = eng.type_of(e)
    return Zero(s, t)


def r_unit_scale(eng, e, parent):
    if not isinstance(e, Scale):
        return None
    if e.coeff.is_zero() or isinstance(e.e, Zero):
        return _zero_like(eng, e), ()
    if e.coeff == 1:
        return e.e, ()
    if isinstance(e.e, Scale):
        return Scale(e.coeff * e.e.coeff, e.e.e), ()
    return None


def r_unit_sum(eng, e, parent):
    if not isinstance(e, Sum):
        return None
    flat: list[MapExpr] = []
    for p in e.parts:
        flat.extend(p.parts if isinstance(p, Sum) else (p,))
    # a zero summand is dropped unless it is the only witness of a wedge summand
    live = {eng.type_of(p)[0] for p in flat if not isinstance(p, Zero)}
    kept: list[MapExpr] = []
    for p in flat:
        if isinstance(p, Zero):
            if p.source in live or any(isinstance(q, Zero) and q.source == p.source for q in kept):
                continue
        kept.append(p)
    if len(kept) == 1:
        return kept[0], ()
    if tuple(kept) != e.parts:
        return Sum(tuple(kept)), ()
    return None


def r_unit_identity(eng, e, parent):
    if isinstance(e, DegreeMap):
        if e.coeff.is_zero():
            return Zero(e.dim, f"S{e.dim}"), ()
        if e.coeff == 1:
            return Gen(f"iota_{e.dim}@S{e.dim}"), ()
        return None
    if isinstance(e, Compose):
        left, right = e.left, e.right
        if isinstance(left, Zero) or isinstance(right, Zero):
            return _zero_like(eng, e), ()
        if isinstance(left, Gen) and eng.gen_ref(left.key).is_identity:
            return right, ()
        if isinstance(right, Gen) and eng.gen_ref(right.key).is_identity:
            return left, ()
        if isinstance(left, DegreeMap) and isinstance(right, DegreeMap):
            return DegreeMap(left.coeff * right.coeff, left.dim), ()
        if isinstance(left, DegreeMap) and isinstance(right, Compose) and isinstance(right.left, DegreeMap):
            return Compose(DegreeMap(left.coeff * right.left.coeff, left.dim), right.right), ()
        return None
    if isinstance(e, Bracket) and (isinstance(e.a, Zero) or isinstance(e.b, Zero)):
        return _zero_like(eng, e), ()
    if isinstance(e, Suspend) and isinstance(e.e, Zero):
        return _zero_like(eng, e), ()
    return None


def r_assoc(eng, e, parent):
    if isinstance(e, Compose) and isinstance(e.left, Compose):
        return Compose(e.left.left, Compose(e.left.right, e.right)), ()
    return None


def r_bind(eng, e, parent):
    if not eng.bindings or not isinstance(e, Compose):
        return None
    left, right = e.left, e.right
    rest = None
    if isinstance(right, Compose) and isinstance(right.left, Gen):
        first, rest = right.left.key, right.right
    elif isinstance(right, Gen):
        first = right.key
    else:
        return None
    if isinstance(left, Gen):
        value = eng.bindings.get((left.key, first))
        if value is None:
            return None
    elif isinstance(left, Suspend) and isinstance(left.e, Gen):
        value = None
        for (f, g), v in eng.bindings.items():
            image = eng.catalog.gen_suspensions.get(g)
            if f == left.e.key and image is not None and image[0] == (first,):
                value = Suspend(v)
                break
        if value is None:
            return None
    else:
        return None
    return (value if rest is None else Compose(value, rest)), (eng.binding_citation,)


def r1_post(eng, e, parent):
    if not isinstance(e, Compose):
        return None
    f, g = e.left, e.right
    if isinstance(g, Sum):
        return Sum(tuple(Compose(f, p) for p in g.parts)), ("post-composition is a homomorphism",)
    if isinstance(g, Scale):
        return Scale(g.coeff, Compose(f, g.e)), ("post-composition is a homomorphism",)
    if isinstance(g, Elem):
        return Compose(f, eng.expand_elem(g)), ()
    return None


def r3_degree(eng, e, parent):
    if isinstance(e, Compose) and isinstance(e.right, DegreeMap):
        return Scale(e.right.coeff, e.left), ("precomposition with a degree map",)
    return None


def r_wedge(eng, e, parent):
    if not (isinstance(e, Compose) and eng.is_wedge_map(e.left)):
        return None
    w, g = e.left, e.right
    rest = None
    if isinstance(g, Compose) and isinstance(g.left, Gen):
        inc, rest = g.left, g.right
    elif isinstance(g, Gen):
        inc = g
    else:
        return None
    ref = eng.gen_ref(inc.key)
    if ref.kind != "inclusion":
        return None
    parts = tuple(p for p in w.parts if eng.type_of(p)[0] == ref.source)
    if not parts:
        comp: MapExpr = Zero(ref.source, eng.type_of(w)[1])
    else:
        comp = parts[0] if len(parts) == 1 else Sum(parts)
    return (comp if rest is None else Compose(comp, rest)), ("restriction of a wedge map to a wedge summand",)


def r_natural(eng, e, parent):
    if isinstance(e, Compose) and isinstance(e.right, Bracket):
        b = e.right
        return Bracket(Compose(e.left, b.a), Compose(e.left, b.b)), ("naturality of Whitehead products",)
    return None


def r2_pre(eng, e, parent):
    if not isinstance(e, Compose) or not eng.is_suspension(e.right):
        return None
    f, g = e.left, e.right
    cite = ("pre-composition with a suspension is a homomorphism",)
    if isinstance(f, Sum) and not eng.is_wedge_map(f):
        return Sum(tuple(Compose(p, g) for p in f.parts)), cite
    if isinstance(f, Scale):
        return Scale(f.coeff, Compose(f.e, g)), cite
    if isinstance(f, Elem):
        return Compose(eng.expand_elem(f), g), ()
    return None


def r4_hilton(eng, e, parent):
    if not isinstance(e, Compose):
        return None
    f, g = e.left, e.right
    if eng.is_suspension(g) and not isinstance(f, DegreeMap):
        return None
    g_src = eng.type_of(g)[0]
    if isinstance(f, DegreeMap):
        if isinstance(g, Compose) and isinstance(g.left, DegreeMap) and g.left.dim == f.dim:
            return Compose(DegreeMap(f.coeff * g.left.coeff, f.dim), g.right), ("degree maps compose by multiplying degrees",)
        if (
            isinstance(parent, Compose)
            and parent.right is e
            and isinstance(parent.left, DegreeMap)
            and parent.left.dim == f.dim
        ):
            return None  # merge with the outer degree map first
        if isinstance(g, (Sum, Scale, Elem, DegreeMap, Bracket, Zero)):
            return None
        if isinstance(g, Gen) and eng.gen_ref(g.key).is_identity:
            return None
        if not isinstance(g_src, int):
            raise HiltonTruncationError(f"Hilton expansion needs a spherical class, got {g}")
        if eng.catalog.is_h_space(f"S{f.dim}"):
            return Scale(f.coeff, g), ("Hilton's formula", eng.catalog.h_spaces[f"S{f.dim}"])
        h, cites = eng.hopf(g)
        if h is None:
            return Scale(f.coeff, g), ("Hilton's formula",) + cites
        trunc = eng._check_truncation(f.dim, g_src)
        try:
            c2 = f.coeff.binom2()
        except NonIntegralError as exc:
            raise HiltonTruncationError(f"binomial coefficient of {f.coeff} is not integral") from exc
        iota = Gen(f"iota_{f.dim}@S{f.dim}")
        new = Sum((Scale(f.coeff, g), Scale(c2, Compose(Bracket(iota, iota), h))))
        return new, ("Hilton's formula", trunc) + cites
    if isinstance(f, Scale):
        f_src = eng.type_of(f.e)[0]
        if not isinstance(f_src, int):
            return None
        return Compose(f.e, Compose(DegreeMap(f.coeff, f_src), g)), ("multiple of a class is the class after a degree map",)
    if isinstance(f, Elem):
        return Compose(eng.expand_elem(f), g), ()
    if isinstance(f, Sum) and not eng.is_wedge_map(f):
        p = eng.type_of(f)[0]
        if not isinstance(p, int) or not isinstance(g_src, int):
            return None
        linear = tuple(Compose(q, g) for q in f.parts)
        target = eng.type_of(f)[1]
        if eng.catalog.is_h_space(target):
            return Sum(linear), ("Hilton's formula", eng.catalog.h_spaces[target])
        h, cites = eng.hopf(g)
        if h is None:
            return Sum(linear), ("Hilton's formula",) + cites
        trunc = eng._check_truncation(p, g_src)
        cross = tuple(Compose(Bracket(a, b), h) for a, b in itertools.combinations(f.parts, 2))
        return Sum(linear + cross), ("Hilton's formula", trunc) + cites
    return None


def r5_bilinear(eng, e, parent):
    if not isinstance(e, Bracket):
        return None
    cite = ("bilinearity of Whitehead products",)
    for side in (0, 1):
        x = (e.a, e.b)[side]

        def rebuild(y, side=side):
            return Bracket(y, e.b) if side == 0 else Bracket(e.a, y)

        if isinstance(x, Scale):
            return Scale(x.coeff, rebuild(x.e)), cite
        if isinstance(x, DegreeMap):
            return Scale(x.coeff, rebuild(Gen(f"iota_{x.dim}@S{x.dim}"))), cite
        if isinstance(x, Sum) and not eng.is_wedge_map(x):
            return Sum(tuple(rebuild(p) for p in x.parts)), cite
        if isinstance(x, Elem):
            return rebuild(eng.expand_elem(x)), ()
    return None


def _head(e: MapExpr) -> str | None:
    while isinstance(e, Compose):
        e = e.left
    return e.key if isinstance(e, Gen) else None


def r6_hspace(eng, e, parent):
    if not isinstance(e, Bracket):
        return None
    target = eng.type_of(e)[1]
    if eng.catalog.is_h_space(target):
        return _zero_like(eng, e), (eng.catalog.h_spaces[target],)
    ha, hb = _head(e.a), _head(e.b)
    if ha is None or ha != hb:
        return None
    ref = eng.gen_ref(ha)
    through = f"S{ref.source}" if isinstance(ref.source, int) else ref.source
    if ref.kind == "inclusion" and eng.catalog.is_h_space(through):
        return _zero_like(eng, e), (eng.catalog.h_spaces[through],)
    return None


def r_susp(eng, e, parent):
    if not isinstance(e, Suspend):
        return None
    x = e.e
    cite = ("suspension is a functor and a homomorphism",)
    if isinstance(x, Compose):
        return Compose(Suspend(x.left), Suspend(x.right)), cite
    if isinstance(x, Sum):
        return Sum(tuple(Suspend(p) for p in x.parts)), cite
    if isinstance(x, Scale):
        return Scale(x.coeff, Suspend(x.e)), cite
    if isinstance(x, DegreeMap):
        return DegreeMap(x.coeff, x.dim + 1), cite
    if isinstance(x, Bracket):
        return _zero_like(eng, e), ("suspension annihilates Whitehead products",)
    if isinstance(x, Elem):
        return Suspend(eng.expand_elem(x)), ()
    return None


def r7_word(eng, e, parent):
    # only maximal words: inner factors are still needed by other rules
    if isinstance(parent, (Compose, Bracket, Suspend)):
        return None
    word = Engine._gen_chain(e)
    if word is None:
        return None
    src, tgt = eng.type_of(e)
    if not isinstance(src, int) or any(k in eng.local_gens for k in word):
        return None
    value, cites = eng.resolve_word(word, tgt, src)
    return Elem(value, tgt, src), cites or ("catalog basis",)


def r7_bracket(eng, e, parent):
    if not (isinstance(e, Bracket) and isinstance(e.a, Gen) and isinstance(e.b, Gen)):
        return None
    found = eng.whitehead_value(e.a.key, e.b.key)
    if found is None:
        n, space = eng.type_of(e)
        raise NotInCatalog(f"Whitehead product {e} in pi_{n}({space}) not in catalog")
    value, cites = found
    return value, cites or ("catalog basis",)


def r7_suspend(eng, e, parent):
    if isinstance(e, Suspend) and isinstance(e.e, Gen):
        image = eng.catalog.gen_suspensions.get(e.e.key)
        if image is not None:
            return chain(*image[0]), (image[1],)
    return None


def r8_reduce(eng, e, parent):
    if isinstance(e, Elem) and e.element.is_zero():
        return Zero(e.degree, e.space), ()
    if isinstance(e, Scale) and isinstance(e.e, Elem):
        return Elem(e.e.element.scale(e.coeff), e.e.space, e.e.degree), ("torsion reduction",)
    if isinstance(e, Sum):
        for i, p in enumerate(e.parts):
            if not isinstance(p, Elem):
                continue
            same = [j for j, q in enumerate(e.parts)
                    if j > i and isinstance(q, Elem) and q.element.presentation == p.element.presentation]
            if not same:
                continue
            total = p.element
            for j in same:
                total = total + e.parts[j].element
            parts = [Elem(total, p.space, p.degree) if j == i else q
                     for j, q in enumerate(e.parts) if j not in same]
            return (parts[0] if len(parts) == 1 else Sum(tuple(parts))), ("collect coordinates",)
    return None


RULES: tuple[tuple[int, str, Rule], ...] = (
    (0, "unit:scale", r_unit_scale),
    (0, "unit:sum", r_unit_sum),
    (0, "unit:identity", r_unit_identity),
    (0, "assoc", r_assoc),
    (0, "bind", r_bind),
    (0, "R1", r1_post),
    (0, "R3", r3_degree),
    (0, "wedge", r_wedge),
    (0, "natural", r_natural),
    (0, "R2", r2_pre),
    (0, "R4", r4_hilton),
    (0, "R5", r5_bilinear),
    (0, "R6", r6_hspace),
    (0, "susp", r_susp),
    (1, "R7:word", r7_word),
    (1, "R7:bracket", r7_bracket),
    (1, "R7:suspension", r7_suspend),
    (2, "R8", r8_reduce),
)
TIERS = (0, 1, 2)
RULE_BY_NAME = {name: fn for _, name, fn in RULES}


# element-level operations --------------------------------------------------------


def group_of(cat: Catalog, pres: GroupPresentation) -> tuple[str, int]:
    for (space, n), grp in cat.groups.items():
        if grp.presentation == pres:
            return space, n
    raise NotInCatalog(f"{pres.name} not in catalog")


def suspend_element(cat: Catalog, e: GroupElement) -> GroupElement:
    space, n = group_of(cat, e.presentation)
    hom, _ = cat.group_suspension(space, n)
    return hom_apply(hom, e)


def suspend_generator(cat: Catalog, key: str) -> MapExpr:
    """Catalog image of a generator under suspension, as an expression."""
    try:
        word, _ = cat.gen_suspensions[key]
    except KeyError:
        raise NotInCatalog(f"no suspension fact for {key}") from None
    return chain(*word)


def is_null_after_suspension(
    eng: Engine, e: MapExpr, title: str = ""
) -> tuple[CongruenceCondition, GroupElement, DerivationTrace]:
    """Vanishing condition of ``e`` read off from its suspension.

    Sound only when the catalog declares suspension injective on the group
    containing ``e``; otherwise :class:`SuspensionRefused` is raised.
    """
    n, space = eng.type_of(e)
    if not isinstance(n, int):
        raise TypeMismatch(f"{e} is not a spherical class")
    gs = eng.catalog.group_suspensions.get((space, n))
    if gs is None or not gs.injective:
        raise SuspensionRefused(f"suspension is not declared injective on pi_{n}({space})")
    target_space, target_n = gs.target
    value, trace = eng.normalize(Suspend(e), target_space, target_n, title=title)
    trace = DerivationTrace(
        trace.initial, trace.steps, trace.result, trace.space, trace.degree, trace.title,
        trace.notes + (f"suspension pi_{n}({space}) -> pi_{target_n}({target_space}) is injective: {gs.citation}",),
    )
    return is_zero_condition(value), value, trace


def replay(eng: Engine, trace: DerivationTrace) -> GroupElement:
    """Re-execute every recorded step and check it reproduces the trace."""
    current = trace.initial
    for i, s in enumerate(trace.steps):
        if s.before != current:
            raise EngineError(f"step {i + 1}: trace does not continue from the previous expression")
        if s.rule == "vanishing-group":
            after = Zero(trace.degree, trace.space)
        else:
            after, _ = eng.apply(current, s.path, s.rule)
        if after != s.after:
            raise EngineError(f"step {i + 1} [{s.rule}]: replay gave {after}, trace has {s.after}")
        current = after
    pres = eng.catalog.lookup_group(trace.space, trace.degree)
    result = eng._read_off(current, pres, trace.space, trace.degree)
    if result != trace.result:
        raise EngineError(f"replay result {result} differs from {trace.result}")
    return result


def substitute(e: MapExpr, values: Mapping[str, Poly | int]) -> MapExpr:
    """Replace parameters by polynomials or integers throughout an expression."""
    if isinstance(e, DegreeMap):
        return DegreeMap(e.coeff.subs(values), e.dim)
    if isinstance(e, Scale):
        return Scale(e.coeff.subs(values), substitute(e.e, values))
    if isinstance(e, Elem):
        pres = e.element.presentation
        return Elem(pres.element({lbl: c.subs(values) for lbl, c in e.element.items()}), e.space, e.degree)
    kids = e.children()
    if not kids:
        return e
    return e.with_children(tuple(substitute(k, values) for k in kids))
