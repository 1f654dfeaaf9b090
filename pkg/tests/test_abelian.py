import pytest
from hypothesis import given
from hypothesis import strategies as st

from degmaps.abelian import (
    Congruence,
    CongruenceCondition,
    GroupPresentation,
    Homomorphism,
    HomomorphismError,
    element_from_vector,
    hom_apply,
    is_zero_condition,
    reduce,
)
from degmaps.poly import Poly

from test_poly import polys, values

k, l = Poly.var("k"), Poly.var("l")

PI7 = GroupPresentation.of("pi_7(S4)", [("nu_4", 0), ("a_4", 12)])
PI8 = GroupPresentation.of("pi_8(S4)", [("nu4eta7", 2), ("a4eta7", 2)])
ETA = Homomorphism.from_labels(PI7, PI8, {"nu_4": {"nu4eta7": 1}, "a_4": {"a4eta7": 1}})


def test_presentation_checks():
    with pytest.raises(ValueError):
        GroupPresentation.of("bad", [("x", 1)])
    with pytest.raises(ValueError):
        GroupPresentation.of("bad", [("x", 2), ("x", 3)])
    assert PI7.exponent() == 12
    assert GroupPresentation("triv").is_trivial()


def test_torsion_reduction_keeps_polynomials():
    e = PI7.element({"nu_4": 2 * k, "a_4": 13 * k - 1})
    assert e.coefficient("a_4") == k + 11
    assert e.coefficient("nu_4") == 2 * k
    assert str(PI8.element({"a4eta7": 3 * k * l + k})) == "(k*l + k)*a4eta7"


def test_is_zero_condition():
    e = PI8.element({"a4eta7": k})
    cond = is_zero_condition(e)
    assert str(cond) == "k ≡ 0 (mod 2)"
    assert cond.holds({"k": 4}) and not cond.holds({"k": 3})
    assert is_zero_condition(PI8.zero()).is_true()
    assert str(is_zero_condition(PI7.basis("nu_4").scale(k))) == "k = 0"


def test_condition_algebra():
    c1 = CongruenceCondition.of([Congruence(k, 2)])
    c2 = CongruenceCondition.of([Congruence(l + 2, 2), Congruence(Poly.const(4), 2)])
    both = c1 & c2
    assert both.moduli() == (2, 2)
    assert both.variables() == ("k", "l")
    assert str(c1 & c1) == str(c1)
    assert both.substitute({"k": 2 * k, "l": 2 * l}).is_true()
    assert both.to_json() == [{"poly": "k", "modulus": 2}, {"poly": "l", "modulus": 2}]


def test_homomorphism_rejects_bad_images():
    z = GroupPresentation.of("Z", [("x", 0)])
    z2 = GroupPresentation.of("Z2", [("y", 2)])
    Homomorphism.from_labels(z, z2, {"x": {"y": 1}})
    with pytest.raises(HomomorphismError):
        Homomorphism.from_labels(z2, z, {"y": {"x": 1}})


@given(polys(), polys())
def test_reduce_idempotent(p, q):
    e = element_from_vector(PI7, [p, q])
    assert reduce(reduce(e)) == reduce(e)
    assert reduce(e + PI7.zero()) == reduce(e)


@given(polys(), polys(), values)
def test_zero_condition_matches_instantiation(p, q, v):
    e = element_from_vector(PI8, [p, q])
    assert is_zero_condition(e).holds(v) == e.instantiate(v).is_zero()


@given(polys(), polys(), polys(), polys())
def test_hom_apply_commutes_with_reduce(p, q, r, s):
    e = element_from_vector(PI7, [p, q])
    raw = type(e)(PI7, (p, q))
    assert hom_apply(ETA, raw) == hom_apply(ETA, reduce(raw))
    f = element_from_vector(PI7, [r, s])
    assert hom_apply(ETA, e + f) == hom_apply(ETA, e) + hom_apply(ETA, f)
