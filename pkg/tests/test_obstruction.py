import json

import pytest

from degmaps.catalog import default_catalog_path, load_catalog
from degmaps.degsets import DegreeSet
from degmaps.obstruction import (
    CASE7_NOTE,
    CASES,
    PAIRS,
    THEOREM_TABLE,
    PipelineError,
    UnsupportedPair,
    compute_all,
    compute_pair,
    extension_condition,
    make_context,
    punctured_equivalence,
    skeleton_family,
    theorem_sets,
)
from degmaps.poly import Poly
from degmaps.spaces import MANIFOLDS

k, l, eps = Poly.var("k"), Poly.var("l"), Poly.var("eps")


def test_nine_pairs_numbered():
    assert sorted(CASES.values()) == list(range(1, 10))
    assert len(PAIRS) == 9 and PAIRS[0] == ("S3xS5", "S3xS5")


def test_all_pairs_match_table(signed_catalog):
    res = compute_all(make_context(signed_catalog))
    for p in PAIRS:
        assert res[p].degree_set == theorem_sets()[p], p
        assert str(res[p].degree_set) == THEOREM_TABLE[p]


def test_sign_does_not_change_conditions():
    a = compute_all(make_context(load_catalog(sign=1)))
    b = compute_all(make_context(load_catalog(sign=-1)))
    for p in PAIRS:
        assert str(a[p].condition) == str(b[p].condition)
        assert a[p].polynomial == b[p].polynomial


@pytest.mark.parametrize(
    "pair,cond,poly",
    [
        (("S3xS5", "S3xS5"), "true", "k*l"),
        (("S3xS5", "M01"), "k*l ≡ 0 (mod 2)", "k*l"),
        (("S3xS5", "SU3"), "true", "2*k*l"),
        (("M01", "S3xS5"), "k ≡ 0 (mod 2)", "k*l"),
        (("M01", "M01"), "k*l + k ≡ 0 (mod 2)", "k*l"),
        (("M01", "SU3"), "true", "2*k*l"),
        (("SU3", "S3xS5"), "k ≡ 0 (mod 2)", "2*k"),
        (("SU3", "M01"), "k ≡ 0 (mod 2)", "2*k"),
        (("SU3", "SU3"), "true", "k**2 + 2*k*l"),
    ],
)
def test_conditions_and_polynomials(results, pair, cond, poly):
    r = results[pair]
    assert str(r.condition) == cond
    assert str(r.polynomial) == poly
    assert "eps" not in r.polynomial.variables()


def test_eps_is_free_in_every_condition(results):
    for r in results.values():
        assert "eps" not in r.condition.variables()


def test_mid_cell_condition_for_sphere_targets(ctx):
    for tgt in ("S3xS5", "M01"):
        fam = skeleton_family("SU3", tgt, ctx)
        assert fam.parameters == ("k",)
        assert fam.components[0].w3 == 2
        assert any("k -> 2*k" in n for n in fam.notes)


def test_mid_cell_condition_for_su3(ctx):
    fam = skeleton_family("SU3", "SU3", ctx)
    assert fam.constraint.is_true()
    assert [c.meaning for c in fam.components] == ["alpha", "beta"]


def test_wedge_family_has_torsion_summand(ctx):
    fam = skeleton_family("S3xS5", "M01", ctx)
    assert fam.parameters == ("k", "eps", "l")
    assert [c.torsion for c in fam.components] == [False, True, False]


def test_obstruction_values(results):
    assert str(results[("S3xS5", "M01")].obstruction) == "k*l*a3eta6"
    assert str(results[("M01", "M01")].obstruction) == "(k*l + k)*a3eta6"
    assert str(results[("SU3", "S3xS5")].obstruction) == "k*a4eta7"
    assert results[("S3xS5", "S3xS5")].obstruction.is_zero()


def test_extension_condition_direct(ctx):
    cond, val, traces = extension_condition(skeleton_family("M01", "S3xS5", ctx), ctx)
    assert str(cond) == "k ≡ 0 (mod 2)" and traces


def test_su3_to_m01_needs_transfer(ctx):
    with pytest.raises(UnsupportedPair):
        extension_condition(skeleton_family("SU3", "M01", ctx), ctx)


@pytest.mark.parametrize("d", [2, -4, 2 * k])
def test_punctured_equivalence_even(ctx, d):
    assert punctured_equivalence(ctx, d).ok


@pytest.mark.parametrize("d", [1, 3, -5])
def test_punctured_equivalence_odd(ctx, d):
    tok = punctured_equivalence(ctx, d)
    assert not tok.ok and tok.lhs != tok.rhs


def test_punctured_equivalence_zero(ctx):
    tok = punctured_equivalence(ctx, 0)
    assert tok.ok and tok.lhs.is_zero()


def test_lowest_multiple_for_su3(results):
    s = results[("SU3", "S3xS5")].degree_set
    assert 2 not in s and -2 not in s
    assert 4 in s and 0 in s


def test_zero_and_identity(results):
    for (a, b), r in results.items():
        assert 0 in r.degree_set
        if a == b:
            assert 1 in r.degree_set


def test_composition_closure(results):
    for a in MANIFOLDS:
        for b in MANIFOLDS:
            for c in MANIFOLDS:
                ab, bc, ac = (results[x].degree_set for x in ((a, b), (b, c), (a, c)))
                for x in ab.window(12):
                    for y in bc.window(12):
                        assert x * y in ac, (a, b, c, x, y)


def test_case7_note(results):
    assert CASE7_NOTE in results[("SU3", "S3xS5")].notes
    assert CASE7_NOTE in results[("SU3", "M01")].notes
    assert CASE7_NOTE not in results[("SU3", "SU3")].notes


def test_case8_routes_through_boundary_comparison(results):
    titles = [t.title for t in results[("SU3", "M01")].traces]
    assert any("boundary degree map" in t for t in titles)


def test_witnesses_in_notes(results):
    assert any(n.startswith("witness") for n in results[("SU3", "SU3")].notes)


def test_replay(results):
    for r in results.values():
        r.replay()


def test_json_record(results):
    rec = results[("SU3", "SU3")].to_json()
    assert rec == {
        "pair": ["SU3", "SU3"],
        "condition": "true",
        "polynomial": "k**2 + 2*k*l",
        "degree_set": {"lcm": 4, "residues": [0, 1, 3]},
        "trace_ref": "SU3->SU3",
    }
    assert DegreeSet.from_json(rec["degree_set"]) == results[("SU3", "SU3")].degree_set


def test_unknown_pair(ctx):
    with pytest.raises(UnsupportedPair):
        skeleton_family("S3xS5", "CP4", ctx)


def mutated(tmp_path):
    raw = json.loads(default_catalog_path().read_text(encoding="utf-8"))
    for w in raw["whitehead_values"]:
        if w["a"] == "iota_3@M01":
            w["value"] = {}
    p = tmp_path / "mut.json"
    p.write_text(json.dumps(raw), encoding="utf-8")
    return load_catalog(p, validate=False)


def test_mutation_changes_results(tmp_path):
    cat = mutated(tmp_path)
    assert cat.violations
    res = compute_all(make_context(cat))
    assert str(res[("S3xS5", "M01")].degree_set) == "Z"
    assert str(res[("M01", "M01")].degree_set) == "2Z"
    assert str(res[("SU3", "SU3")].degree_set) == "4Z ∪ (1+2Z)"


def test_pipeline_error_names_stage(tmp_path, ctx):
    raw = json.loads(default_catalog_path().read_text(encoding="utf-8"))
    for sp in raw["spaces"]:
        if sp["id"] == "M01":
            sp.pop("top_attach")
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(raw), encoding="utf-8")
    bad = make_context(load_catalog(p, validate=False))
    with pytest.raises(PipelineError) as err:
        compute_pair("M01", "S3xS5", bad)
    assert err.value.stage == "extension_condition"
