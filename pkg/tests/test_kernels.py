import pytest
from hypothesis import given
from hypothesis import strategies as st

from degmaps import _kernels_py, kernels
from degmaps.degsets import condition
from degmaps.poly import Poly

from test_poly import polys

k, l, eps = Poly.var("k"), Poly.var("l"), Poly.var("eps")
NAMES = ("k", "l", "eps", "kp")

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")


def test_backend_selection(monkeypatch):
    assert kernels.BACKEND in ("cython", "python")
    monkeypatch.setenv(kernels.PURE_ENV, "1")
    mod, name = kernels._select()
    assert name == "python" and mod is _kernels_py


def test_pack_rejects_foreign_variables():
    with pytest.raises(ValueError):
        kernels.pack(k * l, ("k",))


def test_residue_rejects_bad_modulus():
    with pytest.raises(ValueError):
        kernels.residue_values(k, condition([(k, 5)]), ("k",), [24], 24)


@compiled
@given(polys(max_terms=3), st.integers(1, 4))
def test_backends_agree_on_windows(p, m):
    cond = condition([(k + l, m)]) if m > 1 else condition([])
    lo, hi = [-6, -6, 0, -3], [6, 6, 1, 3]
    py = kernels.window_values(p, cond, NAMES, lo, hi, 40, impl=kernels.backend("python"))
    cy = kernels.window_values(p, cond, NAMES, lo, hi, 40, impl=kernels.backend("cython"))
    assert py == cy


@compiled
@given(polys(max_terms=3), st.sampled_from([1, 2, 3, 4, 6, 12]))
def test_backends_agree_on_residues(p, m):
    cond = condition([(k * l, m)]) if m > 1 else condition([])
    sizes = [12, 12, 2, 4]
    py = kernels.residue_values(p, cond, NAMES, sizes, 12, impl=kernels.backend("python"))
    cy = kernels.residue_values(p, cond, NAMES, sizes, 12, impl=kernels.backend("cython"))
    assert py == cy


@compiled
def test_overflow_guard_falls_back():
    p = Poly.const(3) * k**9
    out = kernels.window_values(p, condition([]), ("k",), [-200], [200], 10**30, impl=kernels.backend("cython"))
    assert max(out) == 3 * 200**9


def test_empty_box():
    assert kernels.window_values(k, condition([]), ("k",), [1], [0], 5) == []
