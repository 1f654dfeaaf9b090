import pytest

from degmaps.poly import Poly
from degmaps.spaces import Component, UnsupportedPair, degree_polynomial, load_spaces, space_spec
from degmaps.symcalc import Bracket, Sum, gen

k, l, eps = Poly.var("k"), Poly.var("l"), Poly.var("eps")


@pytest.fixture(scope="module")
def spaces(catalog):
    return load_spaces(catalog)


def test_cell_structures(spaces):
    assert spaces["S3xS5"].top_attach == Bracket(gen("iota_3@S3vS5"), gen("iota_5@S3vS5"))
    m01 = spaces["M01"].top_attach
    assert isinstance(m01, Sum) and m01.parts[0] == spaces["S3xS5"].top_attach
    su3 = spaces["SU3"]
    assert not su3.is_wedge and su3.skeleton.attach == "eta_3@S3" and su3.skeleton.cell == 5
    assert su3.top_attach == gen("xi@HALF")


def test_hurewicz_factors(spaces):
    assert [spaces[s].h3 for s in ("S3xS5", "M01", "SU3")] == [1, 1, 1]
    assert [spaces[s].h5 for s in ("S3xS5", "M01", "SU3")] == [1, 1, 2]


def test_beta_acts_by_two_on_h5(spaces):
    beta = {c.key: c for c in spaces["SU3"].self_classes}["beta@SU3"]
    assert (beta.h3, beta.h5) == (0, 2)


def wedge(target):
    return [Component(k, "iota_3", w3=target.h3), Component(eps, "eta3eta4", torsion=True),
            Component(l, "iota_5", w5=target.h5)]


def test_wedge_degree_polynomials(spaces):
    s = spaces["S3xS5"]
    assert degree_polynomial(s, spaces["M01"], wedge(spaces["M01"])) == k * l
    assert degree_polynomial(s, spaces["SU3"], wedge(spaces["SU3"])) == 2 * k * l


def test_su3_self_maps(spaces):
    su3 = spaces["SU3"]
    comps = [Component(p, c.key, w3=c.h3, w5=c.h5) for p, c in zip((k, l), su3.self_classes)]
    assert degree_polynomial(su3, su3, comps) == k * (k + 2 * l)


def test_su3_to_product_reading(spaces):
    comps = [Component(k, "f_k", w3=2), Component(Poly.const(1), "p", w5=1)]
    assert degree_polynomial(spaces["SU3"], spaces["S3xS5"], comps) == 2 * k


@pytest.mark.parametrize("sid", ["S3xS5", "M01"])
def test_identity_parameters_give_degree_one(spaces, sid):
    s = spaces[sid]
    assert degree_polynomial(s, s, wedge(s)).evaluate({"k": 1, "l": 1, "eps": 0}) == 1


def test_identity_of_su3(spaces):
    su3 = spaces["SU3"]
    comps = [Component(p, c.key, w3=c.h3, w5=c.h5) for p, c in zip((k, l), su3.self_classes)]
    assert degree_polynomial(su3, su3, comps).evaluate({"k": 1, "l": 0}) == 1


def test_eps_never_appears(spaces):
    for a in spaces.values():
        if not a.is_wedge:
            continue
        for b in spaces.values():
            assert "eps" not in degree_polynomial(a, b, wedge(b)).variables()


def test_multiplicative_in_each_degree(spaces):
    s, t = spaces["S3xS5"], spaces["SU3"]
    p = degree_polynomial(s, t, wedge(t))
    for kv in range(-3, 4):
        for lv in range(-3, 4):
            base = p.evaluate({"k": kv, "l": lv})
            assert p.evaluate({"k": 3 * kv, "l": lv}) == 3 * base
            assert p.evaluate({"k": kv, "l": -2 * lv}) == -2 * base


def test_unknown_space(catalog):
    with pytest.raises(UnsupportedPair):
        space_spec(catalog, "CP4")
