import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dgva import builders
from dgva.dg import CheckReport
from dgva.linalg import LinearMap
from dgva.modules import (ConformalMissing, a_module, check_residue_lemmas, classify_module,
                          direct_sum_module, gr_a_module, h_module, inclusion, minimal_polynomial,
                          nat_transform, r_module, r_module_map, rational_roots, star_l)
from dgva.mutate import mutate_module
from dgva.vertex import adjoint_module, check_module_axioms


def test_rational_roots_of_product():
    # (x - 1/2)^2 (x + 3), coefficients low to high
    p = [Fraction(3, 4), Fraction(-11, 4), Fraction(2), Fraction(1)]
    roots, rest = rational_roots(p)
    assert roots == {Fraction(1, 2): 2, Fraction(-3): 1}
    assert len(rest) == 1


def test_minimal_polynomial_jordan_block():
    cols = {0: {1: Fraction(1)}, 1: {}}
    assert minimal_polynomial(cols, 2) == [0, 0, 1]


def test_heisenberg_adjoint_is_ordinary(heis4):
    cl = classify_module(heis4, adjoint_module(heis4))
    assert cl.kind == "ordinary"
    assert cl.evidence["eigenvalues"] == {Fraction(n): 1 for n in range(5)}


def test_jordan_example_is_logarithmic():
    alg, mod = builders.jordan_block_example()
    cl = classify_module(alg, mod)
    assert cl["logarithmic"] and not cl["ordinary"]
    assert cl.kind == "logarithmic"


def test_dual_numbers_classify_by_grading(dual):
    cl = classify_module(dual, adjoint_module(dual))
    assert cl["ordinary"]
    assert "grading" in cl.evidence["L0"]


def test_star_l_requires_conformal_weight(nil):
    adj = adjoint_module(nil)
    one = nil.one
    assert star_l(nil, adj, one, adj.space.e("s")) == adj.space.e("s")
    assert ConformalMissing.__mro__[1] is ValueError


@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_r_module_of_adjoint(small_models, name):
    m = small_models[name]
    N = Fraction(m.space.wt2_max, 2)
    rm = r_module(m, adjoint_module(m), N)
    assert rm.report.passed, str(rm.report)
    assert rm.space.dim == rm.algebra.space.dim


def test_a_module_heisenberg(heis6):
    bm = a_module(heis6, adjoint_module(heis6), 3, 5)
    assert bm.report.passed, str(bm.report)
    assert bm.space.dim == 4
    lem = check_residue_lemmas(bm)
    assert lem.passed and sum(r.checked for _, r in lem.walk()) > 0


@pytest.mark.parametrize("variant", ["F", "W", "FW"])
def test_gr_a_module(nil, variant):
    bm = a_module(nil, adjoint_module(nil), 0, 0)
    g = gr_a_module(bm, variant)
    assert g.report.passed, str(g.report)


@pytest.mark.parametrize("variant", ["psi", "phi", "Psi"])
@pytest.mark.parametrize("name", ["dual", "nilpotent-dg", "heisenberg4"])
def test_natural_transformations_bijective(small_models, name, variant):
    m = small_models[name]
    N = 3 if name == "heisenberg4" else 0
    nt = nat_transform(m, adjoint_module(m), variant, N, Fraction(m.space.wt2_max, 2))
    assert nt.passed and nt.bijective


def test_nat_rejects_unknown_variant(dual):
    with pytest.raises(ValueError):
        nat_transform(dual, adjoint_module(dual), "chi", 0, 0)


def test_direct_sum_and_functoriality(heis4):
    adj = adjoint_module(heis4)
    tot = direct_sum_module(adj, adj)
    assert tot.space.dim == 2 * adj.space.dim
    assert check_module_axioms(heis4, tot, (-1, 1)).passed
    r1, r2 = r_module(heis4, adj, 3), r_module(heis4, tot, 3)
    rep = CheckReport("c2-preserved")
    f = r_module_map(r1, r2, inclusion(adj, tot), rep)
    assert rep.passed and f.is_injective()
    assert isinstance(f, LinearMap)


def test_h_module_of_nilpotent(nil):
    hm = h_module(nil, adjoint_module(nil))
    assert hm.report.passed
    assert hm.module.space.dim == 2


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_module_mutations_are_caught(nil, seed):
    adj = adjoint_module(nil)
    mut, desc = mutate_module(adj, random.Random(seed))
    # the adjoint of a commutative algebra: any changed entry breaks an axiom
    assert not check_module_axioms(nil, mut, (-2, 2)).passed, desc
