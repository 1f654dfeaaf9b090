"""Acceptance criteria, one test (or parametrized family) per criterion.

Each test prints a PASS line when it runs with ``-s``; the summary at the
end of every pytest run lists the outcome of each criterion.
"""

import random
import time

import pytest

from degmaps.catalog import load_catalog
from degmaps.cli import composition_failures, run_verify
from degmaps.degsets import brute_force_oracle
from degmaps.obstruction import PAIRS, THEOREM_TABLE, compute_all, make_context, theorem_sets
from degmaps.poly import Poly
from degmaps.symcalc import Elem, Engine, replace_at, replay
from degmaps.symcalc import substitute

from exprgen import random_expr
from test_obstruction import mutated
from test_symcalc import _random_walk

k, l = Poly.var("k"), Poly.var("l")
SIGNS = pytest.mark.parametrize("sign", [1, -1], ids=["s=+1", "s=-1"])

# pinned tolerances
TABLE_SECONDS = 5.0
ORACLE_SECONDS = 10.0
ORACLE_B, ORACLE_D = 50, 100
CONFLUENCE_N = 1000


def report(n, msg):
    print(f"PASS criterion {n}: {msg}")


def results_for(sign):
    return compute_all(make_context(load_catalog(sign=sign)))


@SIGNS
@pytest.mark.criterion(1, "table reproduction")
def test_criterion_1_table(sign):
    t0 = time.perf_counter()
    res = results_for(sign)
    elapsed = time.perf_counter() - t0
    for p in PAIRS:
        assert str(res[p].degree_set) == THEOREM_TABLE[p], p
        assert res[p].degree_set == theorem_sets()[p]
    assert str(res[("SU3", "SU3")].degree_set) == "4Z ∪ (1+2Z)"
    assert elapsed < TABLE_SECONDS, elapsed
    report(1, f"9/9 entries, {elapsed:.2f}s (s={sign:+d})")


def coefficient(elem, label):
    return elem.coefficient(label)


@SIGNS
@pytest.mark.criterion(2, "intermediate goldens")
def test_criterion_2_goldens(sign):
    res = results_for(sign)
    assert coefficient(res[("S3xS5", "M01")].obstruction, "a3eta6") == k * l
    assert coefficient(res[("M01", "S3xS5")].obstruction, "a3eta6") == k
    assert coefficient(res[("M01", "M01")].obstruction, "a3eta6") == k * (l + 1)
    assert coefficient(res[("SU3", "S3xS5")].obstruction, "a4eta7") == k
    assert str(res[("SU3", "S3xS5")].obstruction) == "k*a4eta7"
    assert res[("SU3", "SU3")].polynomial == k * (k + 2 * l)
    assert res[("S3xS5", "SU3")].polynomial == 2 * k * l
    assert res[("M01", "SU3")].polynomial == 2 * k * l
    report(2, f"six goldens (s={sign:+d})")


@SIGNS
@pytest.mark.criterion(3, "oracle equivalence at B=100, D=100")
def test_criterion_3_oracle(sign):
    t0 = time.perf_counter()
    res = results_for(sign)
    for p, r in res.items():
        window = r.degree_set.window(ORACLE_D)
        assert window == brute_force_oracle(r.polynomial, r.condition, ORACLE_D, ORACLE_D), p
        # the box of the literal criterion only ever under-approximates
        assert brute_force_oracle(r.polynomial, r.condition, ORACLE_B, ORACLE_D) <= window, p
    elapsed = time.perf_counter() - t0
    assert elapsed < ORACLE_SECONDS, elapsed
    report(3, f"9/9 pairs on [-{ORACLE_D},{ORACLE_D}], {elapsed:.2f}s (s={sign:+d})")


@pytest.mark.xfail(
    strict=True,
    reason="with |k|,|l| <= 50 the product k*l never equals a prime in (50, 100], "
    "so pairs with polynomial k*l cannot reach their full window",
)
@pytest.mark.criterion(3, "oracle equivalence at the literal B=50, D=100")
def test_criterion_3_literal_box():
    res = results_for(1)
    for p, r in res.items():
        assert r.degree_set.window(ORACLE_D) == brute_force_oracle(r.polynomial, r.condition, ORACLE_B, ORACLE_D), p


@pytest.mark.criterion(4, "sign robustness")
def test_criterion_4_sign():
    a, b = results_for(1), results_for(-1)
    for p in PAIRS:
        assert a[p].degree_set == b[p].degree_set
        assert a[p].polynomial == b[p].polynomial
        assert str(a[p].condition) == str(b[p].condition)
        assert str(a[p].obstruction) == str(b[p].obstruction)
    report(4, "criteria 1-3 identical for s=+1 and s=-1")


@pytest.mark.criterion(5, "D(SU3, S3xS5) regression")
def test_criterion_5_regression():
    for sign in (1, -1):
        s = results_for(sign)[("SU3", "S3xS5")].degree_set
        assert 2 not in s
        assert 4 in s
    report(5, "2 not in D(SU3,S3xS5), 4 in D(SU3,S3xS5)")


@pytest.mark.criterion(6, "property suites")
def test_criterion_6_properties():
    eng = Engine(load_catalog())
    rng = random.Random(6)
    failures = 0
    for _ in range(CONFLUENCE_N):
        e, space, n = random_expr(rng)
        value, trace = eng.normalize(e, space, n)
        # confluence: random first step, then a fully random rule order
        first = list(eng.candidates(e))
        if first:
            _, path, _, new, _ = rng.choice(first)
            failures += eng.normalize(replace_at(e, path, new), space, n)[0] != value
        final = _random_walk(eng, e, rng)
        failures += eng._read_off(final, eng.catalog.lookup_group(space, n), space, n) != value
        # idempotence of reduction
        failures += eng.normalize(Elem(value, space, n), space, n)[0] != value
        # replay fidelity
        failures += replay(eng, trace) != value
        # normal forms commute with instantiation
        vals = {"k": rng.randint(-4, 4), "l": rng.randint(-4, 4), "eps": rng.randint(0, 1)}
        inst = eng.normalize(substitute(e, vals), space, n)[0]
        failures += inst != value.instantiate(vals)
    for sign in (1, -1):
        res = results_for(sign)
        failures += len(composition_failures(res, 30))
        for r in res.values():
            r.replay()
    assert failures == 0
    report(6, f"{CONFLUENCE_N} random expressions, zero failures")


@pytest.mark.criterion(7, "mutation sensitivity")
def test_criterion_7_mutation(tmp_path):
    cat = mutated(tmp_path)
    res = compute_all(make_context(cat))
    assert str(res[("M01", "M01")].degree_set) != THEOREM_TABLE[("M01", "M01")]
    assert str(res[("S3xS5", "M01")].degree_set) != THEOREM_TABLE[("S3xS5", "M01")]
    rep = run_verify(str(tmp_path / "mut.json"), ORACLE_D, ORACLE_D)
    assert not rep.ok and rep.verified < 9
    assert any("attaching-maps" in f for f in rep.failures)
    clean = run_verify(None, ORACLE_D, ORACLE_D)
    assert clean.ok and clean.verified == 9
    report(7, f"mutated catalog caught by verify ({rep.verified}/9)")
