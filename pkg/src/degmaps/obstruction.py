"""Per-pair pipeline: skeleton classes, top-cell obstruction, degree set.

A map M -> N between these manifolds is built cell by cell.  The 5-skeleton
class is parameterized, the obstruction to extending over the 8-cell is the
composite with the top attaching map, and the degree is read off from the
cohomology pullbacks of the extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .abelian import CongruenceCondition, GroupElement, is_zero_condition
from .catalog import Catalog, GeneratorRef, load_catalog
from .degsets import DegreeSet, Unresolved, image_report
from .poly import Poly
from .spaces import MANIFOLDS, Component, SpaceSpec, UnsupportedPair, degree_polynomial, load_spaces
from .symcalc import (
    Compose,
    DerivationTrace,
    Engine,
    MapExpr,
    Sum,
    chain,
    deg,
    gen,
    is_null_after_suspension,
    replay,
    scale,
)

K, L, EPS = Poly.var("k"), Poly.var("l"), Poly.var("eps")

# proof-case numbering of the nine ordered pairs
CASES = {
    ("S3xS5", "S3xS5"): 1,
    ("S3xS5", "M01"): 2,
    ("S3xS5", "SU3"): 3,
    ("M01", "S3xS5"): 4,
    ("M01", "M01"): 5,
    ("M01", "SU3"): 6,
    ("SU3", "S3xS5"): 7,
    ("SU3", "M01"): 8,
    ("SU3", "SU3"): 9,
}
PAIRS = tuple((a, b) for a in MANIFOLDS for b in MANIFOLDS)

THEOREM_TABLE = {
    ("S3xS5", "S3xS5"): "Z",
    ("S3xS5", "M01"): "2Z",
    ("S3xS5", "SU3"): "2Z",
    ("M01", "S3xS5"): "2Z",
    ("M01", "M01"): "Z",
    ("M01", "SU3"): "2Z",
    ("SU3", "S3xS5"): "4Z",
    ("SU3", "M01"): "4Z",
    ("SU3", "SU3"): "4Z ∪ (1+2Z)",
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, pair: tuple[str, str], cause: Exception):
        super().__init__(f"{pair[0]} -> {pair[1]}: {stage} failed: {cause}")
        self.stage = stage
        self.pair = pair
        self.cause = cause


@dataclass
class SkeletonClassFamily:
    domain: SpaceSpec
    target: SpaceSpec
    parameters: tuple[str, ...]
    components: tuple[Component, ...]
    skeleton_map: MapExpr | None
    constraint: CongruenceCondition = field(default_factory=CongruenceCondition.true)
    traces: list[DerivationTrace] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.domain.id, self.target.id)

    def describe(self) -> str:
        parts = " + ".join(f"{c.coeff}*{c.meaning}" if c.coeff != 1 else c.meaning for c in self.components)
        return f"({', '.join(self.parameters)}): {parts}"


@dataclass(frozen=True)
class ProofToken:
    """Outcome of comparing the two attaching maps after a boundary degree map."""

    ok: bool
    lhs: GroupElement
    rhs: GroupElement
    traces: tuple[DerivationTrace, ...]


@dataclass
class PairResult:
    pair: tuple[str, str]
    case: int
    family: SkeletonClassFamily
    condition: CongruenceCondition
    polynomial: Poly
    degree_set: DegreeSet | Unresolved
    traces: list[DerivationTrace]
    notes: list[str] = field(default_factory=list)
    obstruction: GroupElement | None = None
    engines: list[Engine] = field(default_factory=list, repr=False)

    def replay(self) -> list[GroupElement]:
        """Re-execute every trace with the engine that produced it."""
        return [replay(eng, tr) for eng, tr in zip(self.engines, self.traces)]

    @property
    def trace_ref(self) -> str:
        return f"{self.pair[0]}->{self.pair[1]}"

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "condition": str(self.condition),
            "polynomial": str(self.polynomial),
            "degree_set": self.degree_set.to_json(),
            "trace_ref": self.trace_ref,
        }


@dataclass
class Context:
    catalog: Catalog
    spaces: dict[str, SpaceSpec]
    engine: Engine


def make_context(catalog: Catalog | None = None) -> Context:
    cat = catalog or load_catalog()
    return Context(cat, load_spaces(cat), Engine(cat))


# skeleton stage -------------------------------------------------------------


def _solve_mid_cell(cond: CongruenceCondition, var: str) -> tuple[Poly, str] | None:
    """Reparameterize the solutions of ``a*var ≡ 0 (mod m)`` as ``var -> q*var``."""
    q = 1
    for c in cond.clauses:
        a = c.poly
        if a.variables() != (var,) or a.degree() != 1 or a.constant() or c.modulus == 0:
            return None
        coeff = a.terms[0][1]
        q = math.lcm(q, c.modulus // math.gcd(coeff, c.modulus))
    return Poly.var(var) * q, f"{var} -> {q}*{var}"


def _wedge_family(ctx: Context, dom: SpaceSpec, tgt: SpaceSpec) -> SkeletonClassFamily:
    if tgt.id == "SU3":
        a3, b5 = "alpha_3@SU3", "beta_5@SU3"
        comps = (Component(K, "alpha_3", w3=tgt.h3), Component(L, "beta_5", w5=tgt.h5))
        w = Sum((scale(K, gen(a3)), scale(L, gen(b5))))
        return SkeletonClassFamily(dom, tgt, ("k", "l"), comps, w)
    i3, i5 = tgt.inclusion(3), tgt.inclusion(5)
    comps = (
        Component(K, "iota_3", w3=tgt.h3),
        Component(EPS, "eta3eta4", torsion=True),
        Component(L, "iota_5", w5=tgt.h5),
    )
    w = Sum((scale(K, gen(i3)), scale(EPS, chain(i3, "eta_3@S3", "eta_4@S4")), scale(L, gen(i5))))
    return SkeletonClassFamily(dom, tgt, ("k", "eps", "l"), comps, w)


def _complex_family(ctx: Context, dom: SpaceSpec, tgt: SpaceSpec) -> SkeletonClassFamily:
    eng = ctx.engine
    attach = dom.skeleton.attach
    if tgt.id == "SU3":
        comps = tuple(
            Component(p, sc.key.split("@")[0], w3=sc.h3, w5=sc.h5)
            for p, sc in zip((K, L), dom.self_classes)
        )
        # the bottom-cell restriction k*alpha_3 must kill eta_3
        bottom = Compose(scale(K, gen("alpha_3@SU3")), gen(attach))
        val, tr = eng.normalize(bottom, "SU3", 4, title="mid-cell condition")
        fam = SkeletonClassFamily(dom, tgt, ("k", "l"), comps, None, is_zero_condition(val), [tr])
        fam.notes.append("[HALF, SU3] is free on alpha, beta (restrictions of self maps of SU3)")
        return fam
    # a sphere-factor target: the class is determined by its bottom-cell image c*iota_3
    i3 = tgt.inclusion(3)
    bottom = Compose(scale(K, gen(i3)), gen(attach))
    val, tr = eng.normalize(bottom, tgt.id, 4, title="mid-cell condition")
    cond = is_zero_condition(val)
    solved = _solve_mid_cell(cond, "k")
    if solved is None:
        raise UnsupportedPair(f"cannot solve mid-cell condition {cond}")
    sub, how = solved
    q = sub.terms[0][1]
    comps = (Component(K, f"f_k (i* = {q}k*iota_3)", w3=q * tgt.h3), Component(Poly.const(1), "p", w5=tgt.h5 * _p_factor(ctx)))
    fam = SkeletonClassFamily(dom, tgt, ("k",), comps, None, CongruenceCondition.true(), [tr])
    fam.notes.append(f"mid-cell condition {cond} solved by {how}: i* f_k = {q}k*iota_3")
    fam.notes.append(
        "the S5 factor is the bundle projection p; classes differing by composites through S5 "
        "do not change the pullbacks or the obstruction and are not tracked"
    )
    return fam


def _p_factor(ctx: Context) -> int:
    return int(ctx.catalog.map_factors.get("p", {}).get("factor", 1))


def skeleton_family(domain: str, target: str, ctx: Context | None = None) -> SkeletonClassFamily:
    ctx = ctx or make_context()
    if (domain, target) not in CASES:
        raise UnsupportedPair(f"unsupported pair {domain} -> {target}")
    dom, tgt = ctx.spaces[domain], ctx.spaces[target]
    if dom.is_wedge:
        return _wedge_family(ctx, dom, tgt)
    return _complex_family(ctx, dom, tgt)


# top cell ---------------------------------------------------------------------


def _fk_engine(ctx: Context, fam: SkeletonClassFamily) -> Engine:
    q = fam.components[0].w3 // fam.target.h3
    fk = GeneratorRef("f_k", "S3", fam.domain.skeleton_id, False, "class", "skeleton stage")
    return Engine(
        ctx.catalog,
        bindings={(fk.key, f"iota_3@{fam.domain.skeleton_id}"): deg(K * q, 3)},
        local_gens={fk.key: fk},
        binding_citation=f"skeleton stage: f_k restricts to {q}k*iota_3 on the bottom cell",
    )


def extension_condition(
    fam: SkeletonClassFamily, ctx: Context | None = None
) -> tuple[CongruenceCondition, GroupElement | None, list[DerivationTrace]]:
    """Condition on the family parameters for extending over the 8-cell."""
    cond, val, traces, _ = _extension(fam, ctx or make_context())
    return cond, val, traces


def _extension(fam: SkeletonClassFamily, ctx: Context):
    dom, tgt = fam.domain, fam.target
    if dom.top_attach is None:
        raise UnsupportedPair(f"{dom.id} has no top attaching map")
    if fam.skeleton_map is not None:
        expr = Compose(fam.skeleton_map, dom.top_attach)
        val, tr = ctx.engine.normalize(expr, tgt.id, 7, title="top-cell obstruction")
        return is_zero_condition(val), val, [tr], ctx.engine
    if tgt.id == "SU3":
        grp = ctx.catalog.group("SU3", 7)
        if grp.presentation.is_trivial():
            return CongruenceCondition.true(), grp.presentation.zero(), [], ctx.engine
        raise UnsupportedPair("pi_7(SU3) is not trivial in this catalog")
    if tgt.id == "S3xS5":
        eng = _fk_engine(ctx, fam)
        expr = Compose(gen("f_k@S3"), dom.top_attach)
        cond, val, tr = is_null_after_suspension(eng, expr, title="top-cell obstruction (suspended)")
        return cond, val, [tr], eng
    raise UnsupportedPair(f"{dom.id} -> {tgt.id} needs a transfer, not a direct obstruction")


def punctured_equivalence(ctx: Context | None = None, degree: Poly | int | None = None) -> ProofToken:
    """Compare both 8-cell attaching maps after a degree map on the boundary S7."""
    ctx = ctx or make_context()
    degree = Poly.coerce(2 * K if degree is None else degree)
    s3xs5, m01 = ctx.spaces["S3xS5"], ctx.spaces["M01"]
    wedge = m01.skeleton_id
    lhs_e = Compose(_as_wedge(ctx, m01), deg(degree, 7))
    rhs_e = Compose(_as_wedge(ctx, s3xs5), deg(degree, 7))
    lhs, t1 = ctx.engine.normalize(lhs_e, wedge, 7, title="M01 attaching map after the boundary degree map")
    rhs, t2 = ctx.engine.normalize(rhs_e, wedge, 7, title="S3xS5 attaching map after the boundary degree map")
    return ProofToken(lhs == rhs, lhs, rhs, (t1, t2))


def _as_wedge(ctx: Context, space: SpaceSpec) -> MapExpr:
    if space.top_attach is None:
        raise UnsupportedPair(f"{space.id} has no top attaching map")
    return space.top_attach


# pairs ----------------------------------------------------------------------------


CASE7_NOTE = (
    "degree of f_k x p is (2k)*1 with k even; an alternative indexing writes it as 4k "
    "over all k, and both give the same set"
)


def compute_pair(domain: str, target: str, ctx: Context | None = None) -> PairResult:
    ctx = ctx or make_context()
    pair = (domain, target)
    stage = "skeleton_family"
    try:
        fam = skeleton_family(domain, target, ctx)
        notes = list(fam.notes)
        traces = list(fam.traces)
        stage = "extension_condition"
        if pair == ("SU3", "M01"):
            token = punctured_equivalence(ctx)
            traces.extend(token.traces)
            if not token.ok:
                raise RuntimeError(f"attaching maps differ after 2k*iota_7: {token.lhs} vs {token.rhs}")
            notes.append(
                "the two attaching maps agree after an even boundary degree map, so the "
                "boundary condition for SU3 -> M01 is the one for SU3 -> S3xS5"
            )
            donor = skeleton_family("SU3", "S3xS5", ctx)
            ext, obs, t, eng = _extension(donor, ctx)
        else:
            ext, obs, t, eng = _extension(fam, ctx)
        engines = [ctx.engine] * len(traces) + [eng] * len(t)
        traces.extend(t)
        stage = "degree_polynomial"
        poly = degree_polynomial(fam.domain, fam.target, fam.components)
        if pair in (("SU3", "S3xS5"), ("SU3", "M01")):
            notes.append(CASE7_NOTE)
        stage = "image_set"
        cond = fam.constraint & ext
        report = image_report(poly, cond)
    except Exception as exc:
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(stage, pair, exc) from exc
    for w in report.witnesses:
        notes.append(f"witness {w}")
    return PairResult(pair, CASES[pair], fam, cond, poly, report.result, traces, notes, obs, engines)


def compute_all(ctx: Context | None = None) -> dict[tuple[str, str], PairResult]:
    ctx = ctx or make_context()
    return {p: compute_pair(*p, ctx=ctx) for p in PAIRS}


@lru_cache(maxsize=8)
def theorem_sets() -> dict[tuple[str, str], DegreeSet]:
    return {p: DegreeSet.parse(s) for p, s in THEOREM_TABLE.items()}
