"""Homotopy-group facts loaded from a JSON data file.

The catalog is the only source of mathematical input: group presentations,
generator words, suspension images, Hopf invariants, Whitehead products,
composite relations and Hurewicz factors.  Everything the rewrite engine
uses is looked up here, so every derivation step can name its source.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .abelian import GroupPresentation, Homomorphism
from .poly import Poly

CATALOG_ENV = "DEGMAPS_CATALOG"

FACT_KINDS = (
    "group-presentation",
    "suspension-image",
    "hopf-invariant",
    "whitehead-value",
    "composite-relation",
    "hurewicz-factor",
    "vanishing-group",
)


class CatalogError(Exception):
    pass


class CatalogParseError(CatalogError):
    pass


class NotInCatalog(CatalogError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else "not in catalog"


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


class ValidationError(CatalogError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))

    @property
    def rule(self) -> str:
        return self.violations[0].rule


@dataclass(frozen=True)
class GeneratorRef:
    label: str
    target: str
    source: int | str  # sphere dimension, or a space id for cell-complex domains
    suspension: bool = False
    kind: str = "sphere"
    citation: str = ""

    @property
    def key(self) -> str:
        return f"{self.label}@{self.target}"

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"


@dataclass(frozen=True)
class CatalogFact:
    kind: str
    payload: Any
    citation: str


@dataclass(frozen=True)
class BasisEntry:
    label: str
    order: int
    word: tuple[str, ...] | None = None
    bracket: tuple[str, str] | None = None


@dataclass(frozen=True)
class Group:
    space: str
    degree: int
    presentation: GroupPresentation
    basis: tuple[BasisEntry, ...]
    citation: str

    def entry(self, label: str) -> BasisEntry:
        for b in self.basis:
            if b.label == label:
                return b
        raise KeyError(label)

    def word_index(self) -> dict[tuple[str, ...], str]:
        return {b.word: b.label for b in self.basis if b.word is not None}


@dataclass(frozen=True)
class GroupSuspension:
    source: tuple[str, int]
    target: tuple[str, int]
    images: Mapping[str, Mapping[str, int]]
    injective: bool
    citation: str


@dataclass
class Catalog:
    sign: int
    generators: dict[str, GeneratorRef]
    groups: dict[tuple[str, int], Group]
    gen_suspensions: dict[str, tuple[tuple[str, ...], str]]
    group_suspensions: dict[tuple[str, int], GroupSuspension]
    hopf: dict[str, tuple[tuple[str, ...], str]]
    whitehead: dict[tuple[str, str], tuple[dict[str, Poly], str]]
    composites: dict[tuple[str, ...], tuple[dict[str, int], str]]
    hurewicz: dict[str, dict]
    map_factors: dict[str, dict]
    h_spaces: dict[str, str]
    hilton_truncation: dict[int, tuple[int, str]]
    spaces: dict[str, dict]
    degree_range: tuple[int, int] = (3, 8)
    facts: list[CatalogFact] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    source_path: str | None = None

    def generator(self, key: str) -> GeneratorRef:
        try:
            return self.generators[key]
        except KeyError:
            raise NotInCatalog(f"generator {key!r} not in catalog") from None

    def lookup_group(self, space: str, n: int) -> GroupPresentation:
        return self.group(space, n).presentation

    def group(self, space: str, n: int) -> Group:
        lo, hi = self.degree_range
        if not lo <= n <= hi:
            raise NotInCatalog(f"pi_{n}({space}) is outside the catalog range {lo}..{hi}")
        try:
            return self.groups[(space, n)]
        except KeyError:
            raise NotInCatalog(f"pi_{n}({space}) not in catalog") from None

    def group_suspension(self, space: str, n: int) -> tuple[Homomorphism, GroupSuspension]:
        try:
            gs = self.group_suspensions[(space, n)]
        except KeyError:
            raise NotInCatalog(f"no suspension fact for pi_{n}({space})") from None
        src = self.lookup_group(*gs.source)
        tgt = self.lookup_group(*gs.target)
        return Homomorphism.from_labels(src, tgt, gs.images), gs

    def is_h_space(self, space: str) -> bool:
        return space in self.h_spaces


def default_catalog_path() -> Path:
    return Path(str(resources.files("degmaps") / "data" / "catalog.json"))


def resolve_catalog_path(path: str | os.PathLike | None = None) -> Path:
    if path is not None:
        return Path(path)
    env = os.environ.get(CATALOG_ENV)
    return Path(env) if env else default_catalog_path()


def load_catalog(
    path: str | os.PathLike | None = None,
    sign: int | None = None,
    validate: bool = True,
) -> Catalog:
    """Load, build and validate a catalog.

    With ``validate=False`` rule violations are collected in
    ``catalog.violations`` instead of raising, which lets a verification run
    report a broken catalog together with its downstream consequences.
    """
    p = resolve_catalog_path(path)
    try:
        raw = json.loads(Path(p).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogParseError(f"cannot read catalog {p}: {exc}") from exc
    cat = build_catalog(raw, sign=sign)
    cat.source_path = str(p)
    cat.violations = validate_catalog(cat, raw)
    if validate and cat.violations:
        raise ValidationError(cat.violations)
    return cat


def _parse_value(value: Mapping[str, Any], sign: int) -> dict[str, Poly]:
    out = {}
    for label, c in value.items():
        if isinstance(c, str):
            # "s" is the sign of the ambiguous term in [iota_4, iota_4]
            c = Poly.parse(re.sub(r"\bs\b", f"({sign})", c))
        out[label] = Poly.coerce(c)
    return out


def build_catalog(raw: Mapping[str, Any], sign: int | None = None) -> Catalog:
    try:
        return _build(raw, sign)
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogParseError(f"malformed catalog entry: {exc!r}") from exc


def _build(raw: Mapping[str, Any], sign: int | None) -> Catalog:
    if sign is None:
        sign = int(raw.get("sign", {}).get("default", 1))
    facts: list[CatalogFact] = []

    generators = {}
    for g in raw["generators"]:
        ref = GeneratorRef(
            label=g["label"],
            target=g["target"],
            source=g["source"],
            suspension=bool(g.get("suspension", False)),
            kind=g.get("kind", "sphere"),
            citation=g.get("citation", ""),
        )
        if ref.key in generators:
            # duplicates are reported by validation; keep the first
            continue
        generators[ref.key] = ref

    groups = {}
    for entry in raw["groups"]:
        basis = tuple(
            BasisEntry(
                label=f["label"],
                order=int(f["order"]),
                word=tuple(f["word"]) if "word" in f else None,
                bracket=tuple(f["bracket"]) if "bracket" in f else None,
            )
            for f in entry["factors"]
        )
        space, n = entry["space"], int(entry["degree"])
        pres = GroupPresentation.of(f"pi_{n}({space})", [(b.label, b.order) for b in basis])
        groups[(space, n)] = Group(space, n, pres, basis, entry.get("citation", ""))
        kind = "vanishing-group" if not basis else "group-presentation"
        facts.append(CatalogFact(kind, (space, n), entry.get("citation", "")))

    gen_susp, group_susp = {}, {}
    for s in raw.get("suspensions", []):
        if s.get("kind", "generator") == "generator":
            gen_susp[s["generator"]] = (tuple(s["image"]), s.get("citation", ""))
        else:
            src = (s["source"][0], int(s["source"][1]))
            group_susp[src] = GroupSuspension(
                src,
                (s["target"][0], int(s["target"][1])),
                s["images"],
                bool(s.get("injective", False)),
                s.get("citation", ""),
            )
        facts.append(CatalogFact("suspension-image", s, s.get("citation", "")))

    hopf = {}
    for h in raw.get("hopf_invariants", []):
        hopf[h["generator"]] = (tuple(h["value"]), h.get("citation", ""))
        facts.append(CatalogFact("hopf-invariant", h, h.get("citation", "")))

    whitehead = {}
    for w in raw.get("whitehead_values", []):
        whitehead[(w["a"], w["b"])] = (_parse_value(w["value"], sign), w.get("citation", ""))
        facts.append(CatalogFact("whitehead-value", w, w.get("citation", "")))

    composites = {}
    for c in raw.get("composite_relations", []):
        composites[tuple(c["chain"])] = (dict(c["value"]), c.get("citation", ""))
        facts.append(CatalogFact("composite-relation", c, c.get("citation", "")))

    hurewicz, map_factors = {}, {}
    for h in raw.get("hurewicz_factors", []):
        if "map" in h:
            map_factors[h["map"]] = dict(h)
        else:
            hurewicz[h["space"]] = dict(h)
        facts.append(CatalogFact("hurewicz-factor", h, h.get("citation", "")))

    rng = raw.get("range", {})
    return Catalog(
        sign=sign,
        generators=generators,
        groups=groups,
        gen_suspensions=gen_susp,
        group_suspensions=group_susp,
        hopf=hopf,
        whitehead=whitehead,
        composites=composites,
        hurewicz=hurewicz,
        map_factors=map_factors,
        h_spaces={h["space"]: h.get("citation", "") for h in raw.get("h_spaces", [])},
        hilton_truncation={
            int(h["sphere"]): (int(h["max_degree"]), h.get("citation", ""))
            for h in raw.get("hilton_truncation", [])
        },
        spaces={s["id"]: dict(s) for s in raw.get("spaces", [])},
        degree_range=(int(rng.get("min_degree", 3)), int(rng.get("max_degree", 8))),
        facts=facts,
    )


# validation -----------------------------------------------------------------


def _sphere_dim(space: str) -> int | None:
    if space.startswith("S") and space[1:].isdigit():
        return int(space[1:])
    return None


def word_type(cat: Catalog, word: tuple[str, ...]) -> tuple[int | str, str] | None:
    """(source, target) of a composite word, or None if it does not compose."""
    refs = [cat.generators.get(k) for k in word]
    if not refs or any(r is None for r in refs):
        return None
    for outer, inner in zip(refs, refs[1:]):
        if _sphere_dim(inner.target) != outer.source:
            return None
    return refs[-1].source, refs[0].target


def validate_catalog(cat: Catalog, raw: Mapping[str, Any] | None = None) -> list[Violation]:
    out: list[Violation] = []

    def bad(rule: str, msg: str) -> None:
        out.append(Violation(rule, msg))

    for f in cat.facts:
        if not f.citation:
            bad("citation-present", f"{f.kind} fact {f.payload!r} has no citation")

    if raw is not None:
        seen = set()
        for g in raw.get("generators", []):
            key = (g.get("label"), g.get("target"))
            if key in seen:
                bad("unique-generators", f"duplicate generator {key}")
            seen.add(key)
            if not g.get("citation"):
                bad("citation-present", f"generator {key} has no citation")

    if cat.sign not in (1, -1):
        bad("sign", f"sign must be +1 or -1, got {cat.sign}")

    for (space, n), grp in cat.groups.items():
        for b in grp.basis:
            if b.word is not None:
                t = word_type(cat, b.word)
                if t is None:
                    bad("basis-word", f"pi_{n}({space}).{b.label}: word {b.word} unknown or not composable")
                elif t != (n, space):
                    bad("basis-word", f"pi_{n}({space}).{b.label}: word has type {t}")
            elif b.bracket is not None:
                for key in b.bracket:
                    if key not in cat.generators:
                        bad("basis-word", f"pi_{n}({space}).{b.label}: unknown generator {key}")
            else:
                bad("basis-word", f"pi_{n}({space}).{b.label}: needs a word or a bracket")

    def check_value(where: str, space: str, n: int, labels) -> None:
        grp = cat.groups.get((space, n))
        if grp is None:
            bad("referential-integrity", f"{where}: group pi_{n}({space}) missing")
            return
        for label in labels:
            if label not in grp.presentation.labels:
                bad("referential-integrity", f"{where}: {label!r} is not a generator of pi_{n}({space})")

    for (a, b), (value, _) in cat.whitehead.items():
        ra, rb = cat.generators.get(a), cat.generators.get(b)
        if ra is None or rb is None:
            bad("referential-integrity", f"whitehead [{a},{b}] references an unknown generator")
            continue
        if ra.target != rb.target:
            bad("whitehead-target", f"[{a},{b}] has no common target")
            continue
        check_value(f"whitehead [{a},{b}]", ra.target, ra.source + rb.source - 1, value)

    for chain, (value, _) in cat.composites.items():
        t = word_type(cat, chain)
        if t is None:
            bad("composable-relations", f"composite {chain} is not composable")
            continue
        check_value(f"composite {chain}", t[1], t[0], value)

    for key, (image, _) in cat.gen_suspensions.items():
        ref = cat.generators.get(key)
        t = word_type(cat, image)
        if ref is None or t is None:
            bad("referential-integrity", f"suspension of {key} references unknown generators")
            continue
        _check_suspension_order(cat, ref, image, t, bad)

    for (space, n), gs in cat.group_suspensions.items():
        if gs.source not in cat.groups or gs.target not in cat.groups:
            bad("referential-integrity", f"group suspension {gs.source}->{gs.target} references missing groups")
            continue
        try:
            cat.group_suspension(space, n)
        except Exception as exc:  # HomomorphismError, KeyError
            bad("suspension-order", f"group suspension of pi_{n}({space}): {exc}")

    for key, (value, _) in cat.hopf.items():
        if key not in cat.generators or word_type(cat, value) is None:
            bad("referential-integrity", f"hopf invariant of {key} references unknown generators")

    ws = cat.whitehead.get(("iota_3@S3xS5", "iota_5@S3xS5"))
    wm = cat.whitehead.get(("iota_3@M01", "iota_5@M01"))
    if ws is None or wm is None:
        bad("attaching-maps", "Whitehead values of [iota_3, iota_5] in S3xS5 and M01 must both be declared")
    else:
        labels = set(ws[0]) | set(wm[0])
        diff = {lbl: (wm[0].get(lbl, Poly()) - ws[0].get(lbl, Poly())).mod(2) for lbl in labels}
        diff = {k: v for k, v in diff.items() if not v.is_zero()}
        if diff != {"a3eta6": Poly.const(1)}:
            bad(
                "attaching-maps",
                f"[iota_3, iota_5] in M01 and S3xS5 must differ by a3eta6, differ by {diff or 0}",
            )

    su3 = cat.hurewicz.get("SU3")
    if su3 is None or su3.get("h3") != 1 or su3.get("h5") != 2:
        bad("hurewicz", "SU3 must declare h3 = 1 and h5 = 2")

    for space in cat.h_spaces:
        if _sphere_dim(space) is None:
            bad("h-space", f"h-space {space} must be a sphere")

    return out


def _check_suspension_order(cat: Catalog, ref: GeneratorRef, image, t, bad) -> None:
    if not isinstance(ref.source, int):
        return
    src_group = cat.groups.get((ref.target, ref.source))
    tgt_group = cat.groups.get((t[1], t[0]))
    if src_group is None or tgt_group is None:
        return
    src_label = src_group.word_index().get((ref.key,))
    tgt_label = tgt_group.word_index().get(tuple(image))
    if src_label is None or tgt_label is None:
        return
    n = src_group.entry(src_label).order
    m = tgt_group.entry(tgt_label).order
    if n and (m == 0 or n % m):
        bad(
            "suspension-order",
            f"suspension {ref.key} (order {n}) -> {image} (order {m or 'inf'}): order must divide",
        )

