from fractions import Fraction

import pytest

from dgva import builders
from dgva.linalg import OutOfWindow
from dgva.vertex import (adjoint_module, check_conformal, check_module_axioms, check_vertex_axioms,
                         cohomology_vertex, cohomology_vertex_report, mode_shift)


def test_mode_shift_rule():
    # |u_n v| = |u| + |v| - 2n - 2 and the same for doubled weights
    assert mode_shift(-1).deg == 0 and mode_shift(0).deg == -2 and mode_shift(1).wt2 == -4


@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_axioms_pass(small_models, name):
    rep = check_vertex_axioms(small_models[name])
    assert rep.passed, str(rep)
    jac = next(p for p in rep.parts if p.name == "jacobi")
    assert jac.checked > 0


def test_heisenberg_conformal(heis4):
    rep = check_conformal(heis4)
    assert rep.passed, str(rep)
    assert heis4.central_charge == 1
    a1 = heis4.e("a1")
    assert heis4.L(0, a1) == a1
    assert heis4.L(-1, a1) == heis4.D(a1)


def test_nilpotent_dg_has_degenerate_conformal(nil):
    rep = check_vertex_axioms(nil)
    assert any("omega = 0" in n for n in rep.notes)


def test_unknown_modes_below_window(heis4):
    a1 = heis4.e("a1")
    with pytest.raises(OutOfWindow):
        heis4.mode(a1, heis4.n_range[0] - 1, a1)


def test_translation_is_minus_two_mode(heis4):
    vac = heis4.one
    assert heis4.D(vac) == heis4.space.zero()
    assert heis4.D(heis4.e("a1")) == heis4.e("a2")


def test_cohomology_of_nilpotent_dg(nil):
    hv = cohomology_vertex_report(nil)
    H = hv.model
    assert H.space.dim == 2
    assert sorted(b.deg for b in H.space.basis) == [0, 3]
    assert hv.report.passed
    assert check_vertex_axioms(H).passed


def test_cohomology_with_zero_differential_is_identity(dual):
    H = cohomology_vertex(dual)
    assert H.space.dim == dual.space.dim


@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_adjoint_module_axioms(small_models, name):
    m = small_models[name]
    assert check_module_axioms(m, adjoint_module(m), (-2, 2)).passed


def test_truncated_polynomial_borcherds():
    m = builders.truncated_polynomial_va(3)
    assert check_vertex_axioms(m).passed
    # Y(t, x) t = e^{xD}t * t: t_{-2} t = D(t) t = t^3 = 0 here, t_{-1} t = t^2
    assert m.mode(m.e("t1"), -1, m.e("t1")) == m.e("t2")


def test_non_derivation_rejected():
    from dgva.linalg import BasisIndex, Bidegree, GradedSpace
    sp = GradedSpace([BasisIndex("one", Bidegree(0, 0)), BasisIndex("t", Bidegree(2, 2)),
                      BasisIndex("u", Bidegree(4, 4))], exact=True)
    prod = {(0, 0): {0: Fraction(1)}, (0, 1): {1: Fraction(1)}, (1, 0): {1: Fraction(1)},
            (0, 2): {2: Fraction(1)}, (2, 0): {2: Fraction(1)}}
    with pytest.raises(ValueError, match="D-not-derivation"):
        builders.build_comm_dg_algebra_va("bad", sp, prod, {}, "one", D={0: {1: Fraction(1)}})
