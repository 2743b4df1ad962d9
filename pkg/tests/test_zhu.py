from fractions import Fraction

import pytest

from dgva.linalg import Bidegree, OutOfWindow
from dgva.zhu import (BRACKET_SHIFT, c2_subspace, check_uv_vu, circle, eta, gr_zhu, o_span,
                      r_algebra, r_poisson_report, star, zhu_double_gr, zhu_quotient, zhu_sweep)


def test_star_with_vacuum_is_identity(heis4):
    a2 = heis4.e("a2")
    assert star(heis4, heis4.one, a2) == a2
    assert star(heis4, a2, heis4.one) == a2


def test_circle_lands_in_o(heis4):
    O = o_span(heis4, 4)
    z = circle(heis4, heis4.e("a1"), heis4.e("a1"))
    assert O.contains(z)


def test_c2_requires_window(heis4):
    with pytest.raises(OutOfWindow):
        c2_subspace(heis4, 5)


@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_r_algebra_is_dg_poisson(small_models, name):
    m = small_models[name]
    N = Fraction(m.space.wt2_max, 2)
    r = r_algebra(m, N)
    assert r.report.passed, str(r.report)
    assert r_poisson_report(r).passed
    assert r.bracket.shift == BRACKET_SHIFT


def test_heisenberg_r_is_polynomial(heis4):
    r = r_algebra(heis4, 4)
    assert r.dims_by_weight() == {Fraction(n): 1 for n in range(5)}
    assert all(not v for v in r.bracket.entries.values())


def test_nilpotent_dg_quotients_are_trivial(nil):
    assert c2_subspace(nil, 0).dim == 0
    assert o_span(nil, 0).dim == 0
    zp = zhu_quotient(nil, 0, 0)
    assert zp.space.dim == 4 and zp.report.passed


def test_zhu_heisenberg_filtration(heis6):
    zp = zhu_quotient(heis6, 4, 5)
    assert zp.report.passed, str(zp.report)
    assert zp.w_dims() == {Fraction(n): n + 1 for n in range(5)}
    assert zp.stabilized is True


def test_stabilization_unknown_at_window_edge(heis4):
    zp = zhu_quotient(heis4, 3, 4)
    assert zp.stabilized is None
    assert zp.report.notes


def test_cutoff_below_max_wt_rejected(heis4):
    with pytest.raises(ValueError):
        zhu_quotient(heis4, 3, 2)


def test_sweep_antitone(heis6):
    dims = list(zhu_sweep(heis6, 2, [2, 3, 4, 5]).values())
    assert all(b <= a for a, b in zip(dims, dims[1:]))


def test_uv_vu(heis4):
    zp = zhu_quotient(heis4, 3, 4)
    assert check_uv_vu(heis4, zp).passed


@pytest.mark.parametrize("variant", ["F", "W", "FW"])
@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_gr_and_eta(small_models, name, variant):
    m = small_models[name]
    N = 3 if name == "heisenberg4" else 0
    zp = zhu_quotient(m, N, Fraction(m.space.wt2_max, 2), checks=False)
    g = gr_zhu(zp, variant)
    assert g.report.passed, str(g.report)
    if variant in ("F", "FW"):
        assert g.bracket is not None
        want = Bidegree(-2, 0) if variant == "F" else BRACKET_SHIFT
        assert g.bracket.shift == want
    e = eta(r_algebra(m, N), zp, variant, gr=g)
    assert e.passed and e.surjective


def test_double_gr_matches_fw(nil, heis4):
    for m, N in ((nil, 0), (heis4, 3)):
        zp = zhu_quotient(m, N, Fraction(m.space.wt2_max, 2), checks=False)
        assert zhu_double_gr(zp).passed
