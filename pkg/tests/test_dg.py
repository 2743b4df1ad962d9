from fractions import Fraction

from hypothesis import given, strategies as st

from dgva.dg import (Complex, ProductTable, check_complex, check_dg_algebra, check_dg_lie,
                     check_dg_poisson, cohomology, degree_filtration, double_gr,
                     weight_filtration, zero_complex)
from dgva.linalg import BasisIndex, Bidegree, Element, GradedSpace, LinearMap, row_reduce

F1 = Fraction(1)


def nil_space():
    return GradedSpace([BasisIndex("one", Bidegree(0, 0)), BasisIndex("s", Bidegree(1, 0)),
                        BasisIndex("t", Bidegree(2, 0)), BasisIndex("st", Bidegree(3, 0))],
                       exact=True, name="nil")


def nil_algebra(mutate=False):
    sp = nil_space()
    prod = {}
    for i in range(4):
        prod[(0, i)] = {i: F1}
        prod[(i, 0)] = {i: F1}
    prod[(1, 2)] = {3: F1}
    prod[(2, 1)] = {3: -F1 if mutate else F1}
    d = LinearMap(sp, sp, {1: sp.e("t")}, Bidegree(1, 0))
    return Complex(sp, d), ProductTable(sp, sp, sp, prod)


def test_complex_and_cohomology():
    c, _ = nil_algebra()
    assert check_complex(c).passed
    H = cohomology(c)
    assert [b.id for b in H.space.basis] == ["one", "st"]


def test_d_squared_detected():
    sp = GradedSpace([BasisIndex(f"x{i}", Bidegree(i, 0)) for i in range(3)], exact=True)
    d = LinearMap(sp, sp, {0: sp.e("x1"), 1: sp.e("x2")}, Bidegree(1, 0))
    rep = check_complex(Complex(sp, d))
    assert not rep.passed
    assert rep.first_witness().inputs == ("x0",)


@given(st.integers(1, 4), st.integers(1, 4),
       st.lists(st.integers(-2, 2), min_size=16, max_size=16))
def test_two_term_euler_characteristic(n0, n1, coeffs):
    sp = GradedSpace([BasisIndex(f"a{i}", Bidegree(0, 0)) for i in range(n0)]
                     + [BasisIndex(f"b{i}", Bidegree(1, 0)) for i in range(n1)], exact=True)
    cols = {}
    for i in range(n0):
        cols[i] = Element(sp, {n0 + j: Fraction(coeffs[4 * i + j]) for j in range(n1)
                               if coeffs[4 * i + j]})
    d = LinearMap(sp, sp, cols, Bidegree(1, 0))
    H = cohomology(Complex(sp, d))
    h0 = sum(1 for b in H.space.basis if b.deg == 0)
    h1 = sum(1 for b in H.space.basis if b.deg == 1)
    assert h0 - h1 == n0 - n1
    assert h0 == n0 - d.rank()


def test_graded_commutative_algebra():
    c, m = nil_algebra()
    rep = check_dg_algebra(c, m, assoc=True, comm=True, unit=c.space.e("one"))
    assert rep.passed, str(rep)


def test_koszul_sign_mutation_detected():
    c, m = nil_algebra(mutate=True)
    rep = check_dg_algebra(c, m, assoc=True, comm=True)
    assert not rep.passed
    failed = {p.name for p in rep.parts if not p.passed}
    assert "graded-commutativity" in failed


def _lie_example(skew_break=False):
    sp = GradedSpace([BasisIndex(b, Bidegree(0, 0)) for b in ("one", "x", "y", "z")],
                     exact=True)
    prod = {(0, i): {i: F1} for i in range(4)}
    prod.update({(i, 0): {i: F1} for i in range(4)})
    br = {(1, 2): {3: F1}, (2, 1): {3: F1 if skew_break else -F1}}
    return (zero_complex(sp), ProductTable(sp, sp, sp, prod),
            ProductTable(sp, sp, sp, br, shift=Bidegree(0, 0)))


def test_square_zero_poisson():
    c, m, br = _lie_example()
    assert check_dg_poisson(c, m, br, 0).passed


def test_lie_skew_failure_has_witness():
    c, _, br = _lie_example(skew_break=True)
    rep = check_dg_lie(c, br, 0)
    assert not rep.passed
    assert set(rep.first_witness().inputs) == {"x", "y"}


def test_double_gr_on_toy_bifiltration():
    sp = GradedSpace([BasisIndex("u", Bidegree(0, 0)), BasisIndex("v", Bidegree(0, 2)),
                      BasisIndex("w", Bidegree(2, 2)), BasisIndex("k", Bidegree(2, 4))],
                     exact=True)
    ideal = row_reduce([sp.e("v") - sp.e("w")], sp)
    fw, wf, iso = double_gr(sp, degree_filtration(), weight_filtration(), ideal=ideal)
    assert iso.passed and iso.bijective
    assert fw.space.dim == 3
