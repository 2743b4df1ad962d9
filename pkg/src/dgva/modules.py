"""dg modules: classification, R(M), the bimodule A(M), gr A(M) and the maps psi, phi, Psi."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import gcd
from typing import Optional

from dgva import kernels as K
from dgva.dg import (
    CheckReport, Complex, MorphismReport, ProductTable, check_dg_poisson_module, cohomology,
    run_tuple, sign,
)
from dgva.linalg import (
    BasisIndex, Bidegree, Element, GradedSpace, LinearMap, NotInSubspace, OutOfWindow,
    Subquotient, Subspace, ZERO_SHIFT, kernel, row_reduce, zero_subspace,
)
from dgva.vertex import ModuleModel, VertexModel, check_module_axioms, cohomology_vertex_report
from dgva.zhu import (
    BRACKET_SHIFT, BifilteredQuotient, GrPresentation, GrView, Presentation, ZhuPresentation,
    _in_window, check_d_stable, check_two_lifts, eta, gr_differential, gr_table, gr_zhu,
    layer_bijective, r_algebra, require_window, residue, right_star, star, truncated_quotient,
    wt2_bound, zhu_quotient,
)

NAT_VARIANTS = {"psi": "F", "phi": "W", "Psi": "FW"}


class ConformalMissing(ValueError):
    pass


# ---------------------------------------------------------------- module operations

def star_l(model: VertexModel, module: ModuleModel, u: Element, m: Element) -> Element:
    """u ∗_l m = sum_n C(wt u, n) u_{n-1} m."""
    return residue(module.action, u, m, 1)


def star_r(model: VertexModel, module: ModuleModel, m: Element, u: Element) -> Element:
    """m ∗_r u = (-1)^{|u||m|} sum_n C(wt u - 1, n) u_{n-1} m."""
    return right_star(module.action, m, u)


def circle_m(model: VertexModel, module: ModuleModel, u: Element, m: Element) -> Element:
    """u ∘ m = sum_n C(wt u, n) u_{n-2} m."""
    return residue(module.action, u, m, 2)


def direct_sum_module(m1: ModuleModel, m2: ModuleModel, name=None) -> ModuleModel:
    """M1 ⊕ M2 with ids suffixed by '.1' and '.2'."""
    if m1.algebra is not m2.algebra:
        raise ValueError("summands over different algebras")
    basis = [BasisIndex(f"{b.id}.1", b.bidegree) for b in m1.space.basis] + \
            [BasisIndex(f"{b.id}.2", b.bidegree) for b in m2.space.basis]
    wmax = None
    if m1.space.wt2_max is not None and m2.space.wt2_max is not None:
        wmax = min(m1.space.wt2_max, m2.space.wt2_max)
    sp = GradedSpace(basis, wt2_max=wmax, exact=m1.space.exact and m2.space.exact,
                     name=name or f"{m1.name}+{m2.name}")
    off = m1.space.dim
    act, d = {}, {}
    for (i, n, j), r in m1.action.entries.items():
        act[(i, n, j)] = dict(r)
    for (i, n, j), r in m2.action.entries.items():
        act[(i, n, j + off)] = {k + off: c for k, c in r.items()}
    for j, r in m1.d_rows.items():
        d[j] = dict(r)
    for j, r in m2.d_rows.items():
        d[j + off] = {k + off: c for k, c in r.items()}
    lo = max(m1.action.n_lo, m2.action.n_lo)
    hi = min(m1.action.n_hi, m2.action.n_hi)
    grading = None
    if m1.grading is not None and m2.grading is not None:
        grading = dict(m1.grading)
        grading.update({j + off: g for j, g in m2.grading.items()})
    return ModuleModel(sp.name, m1.algebra, sp, act, d, (lo, hi), grading)


def inclusion(m1: ModuleModel, total: ModuleModel, summand=1) -> LinearMap:
    """Inclusion of a summand of ``direct_sum_module``."""
    off = 0 if summand == 1 else total.space.dim - m1.space.dim
    cols = {j: total.space.unit_vector(j + off) for j in range(m1.space.dim)}
    return LinearMap(m1.space, total.space, cols, ZERO_SHIFT)


# ---------------------------------------------------------------- classification

def _matrix_of(module: ModuleModel, op):
    """Columns of a linear operator given on unit vectors; None where unknown."""
    cols = {}
    for j in range(module.space.dim):
        try:
            cols[j] = op(module.space.unit_vector(j)).c
        except OutOfWindow:
            cols[j] = None
    return cols


def _apply_cols(cols, vec):
    out = {}
    for j, c in vec.items():
        K.axpy(out, cols[j], c)
    return out


def minimal_polynomial(cols: dict, n: int) -> list:
    """Monic minimal polynomial (low to high coefficients) of the operator with columns ``cols``."""
    idx = {}

    def flat(P):
        return {idx.setdefault((i, j), len(idx)): c for j, col in P.items() for i, c in col.items()}

    P = {j: {j: Fraction(1)} for j in range(n)}
    powers = []
    while True:
        powers.append(flat(P))
        ker = kernel(powers, n * n)
        if ker:
            r = ker[0]
            top = r[len(powers) - 1]
            return [r.get(k, Fraction(0)) / top for k in range(len(powers))]
        P = {j: _apply_cols(cols, P[j]) for j in range(n)}


def _poly_eval(p, x):
    r = Fraction(0)
    for c in reversed(p):
        r = r * x + c
    return r


def _poly_div_linear(p, r):
    """p / (x - r) for a root r."""
    out = [Fraction(0)] * (len(p) - 1)
    acc = Fraction(0)
    for k in range(len(p) - 1, 0, -1):
        acc = acc * r + p[k]
        out[k - 1] = acc
    return out


def _divisors(n):
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0] if n else [0]


def rational_roots(p) -> tuple:
    """Roots of p in Q with multiplicities, plus the leftover factor without rational roots."""
    roots = {}
    p = list(p)
    while len(p) > 1 and p[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        p = p[1:]
    changed = True
    while changed and len(p) > 1:
        changed = False
        den = 1
        for c in p:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in p]
        for a in _divisors(ints[0]):
            for b in _divisors(ints[-1]):
                for s in (1, -1):
                    r = Fraction(s * a, b)
                    if _poly_eval(p, r) == 0:
                        roots[r] = roots.get(r, 0) + 1
                        p = _poly_div_linear(p, r)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return dict(sorted(roots.items())), p


@dataclass
class ModuleClassification:
    flags: dict
    evidence: dict
    report: CheckReport

    def __getitem__(self, k):
        return self.flags[k]

    @property
    def kind(self) -> str:
        for k in ("ordinary", "logarithmic", "admissible", "graded", "weak"):
            if self.flags.get(k):
                return k
        return "none"


def _l0_columns(model: VertexModel, module: ModuleModel, evidence):
    if model.has_conformal:
        return _matrix_of(module, lambda m: module.act(model.omega, 1, m))
    if module.grading is not None:
        evidence["L0"] = "no conformal vector: L(0) taken as the grading operator"
        return {j: ({j: Fraction(g, 2)} if g else {}) for j, g in module.grading.items()}
    raise ConformalMissing("conformal-missing: model has no conformal vector")


def _check_grading(module: ModuleModel, grade: dict, rep: CheckReport):
    """u_m M(r) ⊆ M(r + wt u - m - 1) for a grading given on basis positions (doubled)."""
    t = module.action
    A = t.left.basis
    for (i, n, j), r in t.entries.items():
        want = grade[j] + A[i].wt2 - 2 * n - 2
        bad = [k for k in r if grade[k] != want]
        if bad:
            rep.fail((A[i].id, n, module.space.basis[j].id), Element(module.space, r),
                     f"grade {Fraction(want, 2)}")
        else:
            rep.ok()


def classify_module(model: VertexModel, module: ModuleModel, axioms_window=None) -> ModuleClassification:
    """Module-type flags with evidence; all statements are relative to the window."""
    ev = {}
    rep = CheckReport(f"classify[{module.name}]")
    flags = {}
    if axioms_window is not None:
        ax = check_module_axioms(model, module, axioms_window)
        rep.add(ax)
        flags["weak"] = ax.passed
        ev["weak"] = f"module axioms, Jacobi window {axioms_window}"
    else:
        flags["weak"] = True
        ev["weak"] = "assumed (axioms not rerun)"
    if module.grading is not None:
        g = CheckReport("graded")
        _check_grading(module, module.grading, g)
        flags["graded"] = g.failures == 0
        ev["graded"] = f"{g.checked} action entries respect the supplied grading"
    else:
        flags["graded"] = False
        ev["graded"] = "no grading supplied"
    n = module.space.dim
    cols = _l0_columns(model, module, ev)
    if any(c is None for c in cols.values()):
        ev["L0"] = "L(0) unknown on part of the window"
        flags.update(ordinary=False, logarithmic=False, admissible=False)
        return ModuleClassification(flags, ev, rep.finish())
    poly = minimal_polynomial(cols, n)
    roots, rest = rational_roots(poly)
    split = len(rest) == 1
    ev["minimal_polynomial"] = poly
    ev["eigenvalues"] = roots
    # generalized eigenspaces
    gen = {}
    for lam, mult in roots.items():
        P = {j: {j: Fraction(1)} for j in range(n)}
        for _ in range(mult):
            P = {j: _sub_lam(cols, P[j], lam) for j in range(n)}
        imgs = [P[j] for j in range(n)]
        gen[lam] = [Element(module.space, r) for r in kernel(imgs, n)]
    ev["generalized_dims"] = {lam: len(v) for lam, v in gen.items()}
    ev["jordan_max"] = dict(roots)
    flags["logarithmic"] = split and sum(len(v) for v in gen.values()) == n
    flags["ordinary"] = flags["logarithmic"] and all(m == 1 for m in roots.values())
    if flags["logarithmic"]:
        # canonical N-regrading: eigenvalues grouped by class mod Z, offset from the class minimum
        classes = {}
        for lam in roots:
            key = lam - (lam.numerator // lam.denominator)
            classes.setdefault(key, []).append(lam)
        offset = {lam: lam - min(cl) for cl in classes.values() for lam in cl}
        ev["admissible_grading"] = {str(lam): int(o) for lam, o in offset.items()}
        adm = CheckReport("admissible")
        t = module.action
        A = t.left.basis
        spaces = {lam: row_reduce(v, module.space) for lam, v in gen.items()}
        for lam, vecs in gen.items():
            for w in vecs:
                for i in range(t.left.dim):
                    for m_ in range(t.n_lo, t.n_hi + 1):
                        try:
                            z = t.apply(t.left.unit_vector(i), m_, w)
                        except OutOfWindow:
                            adm.skip()
                            continue
                        if not z:
                            adm.ok()
                            continue
                        target = lam + Fraction(A[i].wt2, 2) - m_ - 1
                        sp = spaces.get(target)
                        adm.expect((A[i].id, m_, str(w)), sp is not None and sp.contains(z), z,
                                   f"L0-eigenvalue {target}")
        rep.add(adm)
        flags["admissible"] = adm.passed
    else:
        flags["admissible"] = False
    ev["window_relative"] = True
    return ModuleClassification(flags, ev, rep.finish())


def _sub_lam(cols, vec, lam):
    out = _apply_cols(cols, vec)
    K.axpy(out, vec, -lam)
    return out


# ---------------------------------------------------------------- R(M)

def c2_module(model: VertexModel, module: ModuleModel, max_wt) -> Subspace:
    """Span of v_{-2} m with wt v + wt m + 1 <= max_wt."""
    N2 = wt2_bound(max_wt)
    require_window(module.space, N2, "C2(M)")
    t = module.action
    A, B = model.space.basis, module.space.basis
    rows = []
    for a in range(model.space.dim):
        for b in range(module.space.dim):
            if A[a].wt2 + B[b].wt2 + 2 <= N2:
                r = t.lookup(a, -2, b)
                if r:
                    rows.append(Element(module.space, dict(r)))
    return row_reduce(rows, module.space)


@dataclass
class PoissonModulePresentation:
    algebra: Presentation
    quotient: Presentation
    action: ProductTable
    bracket: ProductTable
    d: LinearMap
    report: CheckReport

    @property
    def space(self):
        return self.quotient.space

    def complex(self):
        return Complex(self.space, self.d)


def r_module(model: VertexModel, module: ModuleModel, max_wt, rv: Presentation = None) -> PoissonModulePresentation:
    N2 = wt2_bound(max_wt)
    rv = rv or r_algebra(model, max_wt)
    c2 = c2_module(model, module, max_wt)
    q = truncated_quotient(module.space, c2, N2, f"R({module.name})")
    t = module.action

    def table(n, shift, name):
        entries = {}
        for a, ra in enumerate(rv.reps):
            for b, rb in enumerate(q.reps):
                try:
                    entries[(a, b)] = q.project(t.apply(ra, n, rb)).c
                except OutOfWindow:
                    continue
        return ProductTable(rv.space, q.space, q.space, entries, shift=shift, partial=True, name=name)

    act = table(-1, ZERO_SHIFT, "R(M)·")
    br = table(0, BRACKET_SHIFT, "R(M){}")
    d = LinearMap(q.space, q.space, {b: q.project(module.d(r)) for b, r in enumerate(q.reps)},
                  Bidegree(1, 0))
    q.d = d
    rep = CheckReport(f"r-module[{module.name}]")
    wd = CheckReport("c2-stable")
    A, B = model.space.basis, module.space.basis
    for a in range(model.space.dim):
        if A[a].wt2 > N2:
            continue
        u = model.space.unit_vector(a)
        for c in c2.rows:
            for n in (-1, 0):
                def one(n=n, c=c):
                    z = t.apply(u, n, c)
                    if _in_window(z, N2):
                        wd.expect((A[a].id, n, str(c)), c2.contains(z), z, "in C2(M)")
                    else:
                        wd.skip()
                run_tuple(wd, one)
    for c in rv.sub.rows:
        if not _in_window(c, N2):
            continue
        for b in range(module.space.dim):
            if B[b].wt2 > N2:
                continue
            for n in (-1, 0):
                def one(n=n, c=c, b=b):
                    z = t.apply(c, n, module.space.unit_vector(b))
                    if _in_window(z, N2):
                        wd.expect((str(c), n, B[b].id), c2.contains(z), z, "in C2(M)")
                    else:
                        wd.skip()
                run_tuple(wd, one)
    rep.add(wd)
    unit = rv.project(model.one)
    rep.add(check_dg_poisson_module(rv.complex(), rv.product, rv.bracket, Complex(q.space, d), act, br,
                                    BRACKET_SHIFT.deg, unit=unit))
    return PoissonModulePresentation(rv, q, act, br, d, rep.finish())


# ---------------------------------------------------------------- A(M)

def o_module_span(model: VertexModel, module: ModuleModel, cutoff) -> Subspace:
    M2 = wt2_bound(cutoff)
    require_window(module.space, M2, "O(M)-span")
    A, B = model.space.basis, module.space.basis
    gens = []
    for a in range(model.space.dim):
        for b in range(module.space.dim):
            if A[a].wt2 + B[b].wt2 + 2 <= M2:
                z = circle_m(model, module, model.space.unit_vector(a), module.space.unit_vector(b))
                if z:
                    gens.append(z)
    return row_reduce(gens, module.space)


@dataclass
class BimodulePresentation:
    model: VertexModel
    module: ModuleModel
    zhu: ZhuPresentation
    Q: BifilteredQuotient
    o_full: Subspace
    left: ProductTable
    right: ProductTable
    d: LinearMap
    report: CheckReport

    @property
    def space(self):
        return self.Q.space

    def w_dims(self):
        return {Fraction(n, 2): d for n, d in self.Q.w_dims().items()}


def a_module(model: VertexModel, module: ModuleModel, max_wt, cutoff, zp: ZhuPresentation = None,
             checks=True) -> BimodulePresentation:
    N2 = wt2_bound(max_wt)
    zp = zp or zhu_quotient(model, max_wt, cutoff)
    if zp.Q.wt2_max != N2 or zp.cutoff != Fraction(cutoff):
        raise ValueError("incompatible truncations: A(V) and A(M) need the same N and M")
    O = o_module_span(model, module, cutoff)
    Q = BifilteredQuotient(module.space, O, N2, f"A({module.name})")
    V = zp.Q
    left, right = {}, {}
    for a, ra in enumerate(V.reps):
        for b, rb in enumerate(Q.reps):
            try:
                left[(a, b)] = Q.coords(star_l(model, module, ra, rb)).c
            except OutOfWindow:
                pass
            try:
                right[(b, a)] = Q.coords(star_r(model, module, rb, ra)).c
            except OutOfWindow:
                pass
    lt = ProductTable(V.space, Q.space, Q.space, left, shift=None, partial=True, name="∗l")
    rt = ProductTable(Q.space, V.space, Q.space, right, shift=None, partial=True, name="∗r")
    d = LinearMap(Q.space, Q.space, {b: Q.coords(module.d(r)) for b, r in enumerate(Q.reps)}, shift=None)
    rep = CheckReport(f"a-module[{module.name}, N={max_wt}, M={cutoff}]")
    bm = BimodulePresentation(model, module, zp, Q, O, lt, rt, d, rep)
    if checks:
        rep.add(check_d_stable(module.d, O, "d(O(M))⊂O(M)"))
        rep.add(check_bimodule_relations(bm))
        rep.add(check_residue_lemmas(bm))
    rep.finish()
    return bm


def _member(rep: CheckReport, S: Subspace, wt2_max, inputs, fn):
    try:
        z = fn()
    except OutOfWindow:
        rep.skip()
        return
    if not _in_window(z, wt2_max):
        rep.skip()
        return
    rep.expect(inputs, S.contains(z), z, "in O(M)")


def check_bimodule_relations(bm: BimodulePresentation) -> CheckReport:
    """The seven relations, as memberships in the truncated O(M), plus the units."""
    model, module = bm.model, bm.module
    Q, V = bm.Q, bm.zhu.Q
    N2 = Q.wt2_max
    OM = Q.ideal
    vs = [model.space.unit_vector(k) for k in V.top_pos]
    ms = [module.space.unit_vector(k) for k in Q.top_pos]
    sl = lambda u, m: star_l(model, module, u, m)
    sr = lambda m, u: star_r(model, module, m, u)
    names = ["O(V)∗l m", "m∗r O(V)", "u∗l O(M)", "O(M)∗r u", "(u∗l m)∗r v", "u∗l(v∗l m)",
             "(m∗r u)∗r v", "unit"]
    parts = [CheckReport(n) for n in names]
    for o in V.ideal.rows:
        for m in ms:
            _member(parts[0], OM, N2, (str(o), str(m)), lambda: sl(o, m))
            _member(parts[1], OM, N2, (str(m), str(o)), lambda: sr(m, o))
    for u in vs:
        for o in OM.rows:
            _member(parts[2], OM, N2, (str(u), str(o)), lambda: sl(u, o))
            _member(parts[3], OM, N2, (str(o), str(u)), lambda: sr(o, u))
    wt = lambda x: x.wt2
    for u, v in iproduct(vs, repeat=2):
        for m in ms:
            if wt(u) + wt(v) + wt(m) > N2:
                for p in parts[4:7]:
                    p.skip()
                continue
            ids = (str(u), str(v), str(m))
            _member(parts[4], OM, N2, ids, lambda: sr(sl(u, m), v) - sl(u, sr(m, v)))
            _member(parts[5], OM, N2, ids, lambda: sl(u, sl(v, m)) - sl(star(model, u, v), m))
            _member(parts[6], OM, N2, ids,
                    lambda: sr(sr(m, u), v) - sr(m, star(model, u, v)))
    one = model.one
    for m in ms:
        parts[7].expect_equal((str(m), "left"), sl(one, m), m)
        parts[7].expect_equal((str(m), "right"), sr(m, one), m)
    rep = CheckReport("bimodule")
    for p in parts:
        rep.add(p)
    rep.add(check_bimodule_tables(bm))
    return rep.finish()


def check_bimodule_tables(bm: BimodulePresentation) -> CheckReport:
    """Bimodule identities on every basis triple of the presentation (unknown entries skipped)."""
    rep = CheckReport("presentation-triples")
    VA, MA = bm.zhu.Q.space, bm.Q.space
    st, lt, rt = bm.zhu.star, bm.left, bm.right
    eV, eM = VA.unit_vector, MA.unit_vector
    ids = lambda a, b, c: (VA.basis[a].id, VA.basis[b].id, MA.basis[c].id)
    for a, b in iproduct(range(VA.dim), repeat=2):
        for c in range(MA.dim):
            x, y, m = eV(a), eV(b), eM(c)
            run_tuple(rep, lambda: rep.expect_equal(ids(a, b, c) + ("l(mr)",),
                                                    rt(lt(x, m), y), lt(x, rt(m, y))))
            run_tuple(rep, lambda: rep.expect_equal(ids(a, b, c) + ("ll",),
                                                    lt(x, lt(y, m)), lt(st(x, y), m)))
            run_tuple(rep, lambda: rep.expect_equal(ids(a, b, c) + ("rr",),
                                                    rt(rt(m, x), y), rt(m, st(x, y))))
    one = bm.zhu.Q.coords(bm.model.one)
    for c in range(MA.dim):
        run_tuple(rep, lambda: rep.expect_equal((MA.basis[c].id, "unit"), lt(one, eM(c)), eM(c)))
        run_tuple(rep, lambda: rep.expect_equal((MA.basis[c].id, "unit"), rt(eM(c), one), eM(c)))
    return rep.finish()


def check_residue_lemmas(bm: BimodulePresentation, kmax=3) -> CheckReport:
    """Res Y(u,z)(1+z)^{wt u+n} z^{-2-k} m ∈ O(M) for k >= n >= 0, and the alternating
    congruence for (1+z)^{wt u - 1} z^{-n}; checked in the O(M)-span up to the cutoff."""
    model, module = bm.model, bm.module
    M2 = wt2_bound(bm.zhu.cutoff)
    O = bm.o_full
    t = module.action
    fz = CheckReport("residue-vanishing")
    alt = CheckReport("alternating")
    A, B = model.space.basis, module.space.basis
    for a in range(model.space.dim):
        for b in range(module.space.dim):
            base = A[a].wt2 + B[b].wt2
            if base + 4 > M2:
                continue
            u, m = model.space.unit_vector(a), module.space.unit_vector(b)
            # k >= n >= 0 with the top term u_{-2-k} m still under the cutoff
            for k in range(kmax + 1):
                if base + 2 + 2 * k > M2:
                    break
                for n in range(k + 1):
                    _member(fz, O, M2, (A[a].id, B[b].id, k, n),
                            lambda: residue(t, u, m, 2 + k, n))
            for n in range(2, kmax + 2):
                if base + 2 * n - 2 > M2:
                    break
                _member(alt, O, M2, (A[a].id, B[b].id, n),
                        lambda: residue(t, u, m, n, -1) - sign(n - 1) * residue(t, u, m, 1, -1))
    rep = CheckReport("residue-lemmas")
    rep.add(fz)
    rep.add(alt)
    return rep.finish()


# ---------------------------------------------------------------- gr A(M)

@dataclass
class GrModulePresentation:
    variant: str
    algebra: GrPresentation
    view: GrView
    action: ProductTable
    right: ProductTable
    bracket: Optional[ProductTable]
    d: LinearMap
    report: CheckReport

    @property
    def space(self):
        return self.view.space

    def complex(self):
        return Complex(self.space, self.d)


def check_diff_filtered_module(GA: GrView, GM: GrView, act: ProductTable, dA: LinearMap,
                               dM: LinearMap, name="left-df-module") -> CheckReport:
    """Filtered action and the Leibniz defect in F^{|a|+|v|}, F levels read from the labels."""
    rep = CheckReport(name)
    fa = lambda i: GA.f_level[GA.space.basis[i].id]
    fm = lambda j: GM.f_level[GM.space.basis[j].id]

    def below(v, bound):
        return all(GM.f_level[GM.space.basis[k].id] <= bound for k in v.c)

    filt = CheckReport("filtered-action")
    leib = CheckReport("leibniz-defect")
    eA, eM = GA.space.unit_vector, GM.space.unit_vector
    for i, j in iproduct(range(GA.space.dim), range(GM.space.dim)):
        def one(i=i, j=j):
            x, w = eA(i), eM(j)
            xw = act(x, w)
            ids = (GA.space.basis[i].id, GM.space.basis[j].id)
            filt.expect(ids, below(xw, fa(i) + fm(j)), xw, f"level <= {fa(i) + fm(j)}")
            defect = dM(xw) - act(dA(x), w) - sign(fa(i)) * act(x, dM(w))
            leib.expect(ids, below(defect, fa(i) + fm(j)), defect, f"level <= {fa(i) + fm(j)}")
        try:
            one()
        except OutOfWindow:
            filt.skip()
            leib.skip()
    rep.add(filt)
    rep.add(leib)
    return rep.finish()


def gr_a_module(bm: BimodulePresentation, variant: str, gr_alg: GrPresentation = None) -> GrModulePresentation:
    model, module = bm.model, bm.module
    gA = gr_alg or gr_zhu(bm.zhu, variant)
    GA = gA.view
    GM = GrView(bm.Q, variant)
    rep = CheckReport(f"gr{variant}-a-module[{module.name}]")
    sl = lambda u, m: star_l(model, module, u, m)
    sr = lambda m, u: star_r(model, module, m, u)
    filt = CheckReport("filtered-actions")
    act = gr_table(GA, GM, GM, sl, ZERO_SHIFT, filt, name=f"gr{variant}∗l")
    right = gr_table(GM, GA, GM, sr, ZERO_SHIFT, filt, name=f"gr{variant}∗r")
    rep.add(filt)
    dfilt = CheckReport("filtered-differential")
    d = gr_differential(GM, module.d, dfilt)
    rep.add(dfilt)
    eA, eM = GA.space.unit_vector, GM.space.unit_vector
    nA, nM = GA.space.dim, GM.space.dim
    br = None
    if variant in ("F", "FW"):
        shift = Bidegree(-2, 0) if variant == "F" else BRACKET_SHIFT
        Bv, Bm = model.space.basis, module.space.basis

        def comm(u, m):
            pu = max(Bv[k].deg for k in u.c) if u else 0
            pm = max(Bm[k].deg for k in m.c) if m else 0
            return sl(u, m) - sign(pu * pm) * sr(m, u)

        lifts = (lambda a: bm.zhu.Q.lift(a, variant), lambda b: bm.Q.lift(b, variant))
        bfilt = CheckReport("bracket-level")
        br = gr_table(GA, GM, GM, comm, shift, bfilt, lifts=lifts, name=f"gr{variant}{{}}M")
        rep.add(bfilt)
        two = CheckReport("bracket-two-lifts")
        check_two_lifts(GA, GM, GM, comm, br, two)
        rep.add(two)
        u0 = CheckReport("bracket=u0m")
        for a, b in iproduct(range(nA), range(nM)):
            def one(a=a, b=b):
                z = module.act(lifts[0](a), 0, lifts[1](b))
                g, _ = GM.class_of(z, GA.key(a) + GM.key(b) + shift)
                u0.expect_equal((GA.space.basis[a].id, GM.space.basis[b].id), g,
                                Element(GM.space, dict(br.entry(a, b))))
            run_tuple(u0, one)
        rep.add(u0)
        sk = CheckReport("left=±right")
        for a, b in iproduct(range(nA), range(nM)):
            s = sign(GA.key(a).deg * GM.key(b).deg)
            run_tuple(sk, lambda a=a, b=b, s=s: sk.expect_equal(
                (GA.space.basis[a].id, GM.space.basis[b].id), act(eA(a), eM(b)), s * right(eM(b), eA(a))))
        rep.add(sk)
        shifts = CheckReport("table-shifts")
        act.check_shift(shifts)
        right.check_shift(shifts)
        br.check_shift(shifts)
        rep.add(shifts)
        unit, _ = GA.class_of(model.one, Bidegree(0, 0))
        rep.add(check_dg_poisson_module(gA.complex(), gA.product, gA.bracket, Complex(GM.space, d),
                                        act, br, -2, unit=unit))
    else:
        shifts = CheckReport("table-shifts")
        act.check_shift(shifts)
        right.check_shift(shifts)
        rep.add(shifts)
        mod = CheckReport("module")
        for a, b, c in iproduct(range(nA), range(nA), range(nM)):
            run_tuple(mod, lambda a=a, b=b, c=c: mod.expect_equal(
                (GA.space.basis[a].id, GA.space.basis[b].id, GM.space.basis[c].id),
                act(gA.product(eA(a), eA(b)), eM(c)), act(eA(a), act(eA(b), eM(c)))))
        unit, _ = GA.class_of(model.one, Bidegree(0, 0))
        for c in range(nM):
            run_tuple(mod, lambda c=c: mod.expect_equal((GM.space.basis[c].id, "unit"),
                                                        act(unit, eM(c)), eM(c)))
        rep.add(mod)
        rep.add(check_diff_filtered_module(GA, GM, act, gA.d, d))
        dfc = CheckReport("df-commutation")
        for a, b in iproduct(range(nA), range(nM)):
            p = GA.f_level[GA.space.basis[a].id]
            q = GM.f_level[GM.space.basis[b].id]
            def one(a=a, b=b, p=p, q=q):
                z = act(eA(a), eM(b)) - sign(p * q) * right(eM(b), eA(a))
                ok = all(GM.f_level[GM.space.basis[k].id] <= p + q - 1 for k in z.c)
                dfc.expect((GA.space.basis[a].id, GM.space.basis[b].id), ok, z, f"F^{p + q - 1}")
            run_tuple(dfc, one)
        rep.add(dfc)
    return GrModulePresentation(variant, gA, GM, act, right, br, d, rep.finish())


# ---------------------------------------------------------------- psi, phi, Psi

@dataclass
class NatTransform:
    name: str
    morphism: MorphismReport
    source: GradedSpace
    layers: Optional[CheckReport]
    adjoint: bool

    @property
    def bijective(self):
        return self.morphism.bijective

    @property
    def passed(self):
        return self.morphism.passed and (self.layers is None or self.layers.passed)


def _homogeneous_kernel(mat: LinearMap) -> list:
    """Kernel of a map computed block by block over the source bidegrees."""
    S = mat.source
    out = []
    for bd in S.bidegrees():
        comp = S.component(bd)
        imgs = [mat.column(i).c for i in comp]
        for r in kernel(imgs, mat.target.dim):
            out.append(Element(S, {comp[j]: c for j, c in r.items()}))
    return out


def nat_transform(model: VertexModel, module: ModuleModel, variant: str, max_wt, cutoff,
                  cache: dict = None) -> NatTransform:
    """psi (F), phi (W) or Psi (FW): R(M)/(Ker eta)R(M) -> gr A(M), m ↦ class of m."""
    if variant not in NAT_VARIANTS:
        raise ValueError(f"variant must be one of {tuple(NAT_VARIANTS)}")
    gv = NAT_VARIANTS[variant]
    cache = {} if cache is None else cache
    key = (id(model), id(module), Fraction(max_wt), Fraction(cutoff))
    if key not in cache:
        rv = r_algebra(model, max_wt)
        zp = zhu_quotient(model, max_wt, cutoff)
        cache[key] = {"rv": rv, "zp": zp, "rm": r_module(model, module, max_wt, rv),
                      "bm": a_module(model, module, max_wt, cutoff, zp)}
    c = cache[key]
    rv, zp, rm, bm = c["rv"], c["zp"], c["rm"], c["bm"]
    if ("gr", gv) not in c:
        ga = gr_zhu(zp, gv)
        c[("gr", gv)] = (ga, gr_a_module(bm, gv, ga), eta(rv, zp, gv, ga))
    ga, gm, et = c[("gr", gv)]
    rep = CheckReport(f"{variant}[{module.name}]")
    rep.add(rm.report)
    rep.add(bm.report)
    rep.add(gm.report)
    rep.add(et.report)

    # (Ker eta) R(M)
    kers = _homogeneous_kernel(et.matrix)
    q = rm.quotient
    kgens = []
    for k in kers:
        for b in range(q.space.dim):
            try:
                kgens.append(rm.action(k, q.space.unit_vector(b)))
            except OutOfWindow:
                continue
    KM = row_reduce(kgens, q.space) if kgens else zero_subspace(q.space)
    sq = Subquotient([q.space.unit_vector(b) for b in range(q.space.dim)], KM)
    src_basis = [q.space.basis[next(iter(r.c))] for r in sq.reps]
    S = GradedSpace(src_basis, name=f"R({module.name})/KerEta·R")
    to_src = lambda x: Element(S, {j: v for j, v in enumerate(sq.coords(x)) if v})
    amb = lambda x: sum((cc * q.reps[i] for i, cc in x.c.items()), module.space.zero())
    G = gm.view

    def target(bd):
        if gv == "F":
            return Bidegree(bd.deg, 0)
        if gv == "W":
            return Bidegree(0, bd.wt2)
        return bd

    cols = {}
    lev = CheckReport("lands-in-layer")
    for j, r in enumerate(sq.reps):
        m = amb(r)
        g, bad = G.class_of(m, target(S.basis[j].bidegree))
        lev.expect((S.basis[j].id,), not bad, G.Q.coords(m), "no higher components")
        cols[j] = g
    rep.add(lev)
    mat = LinearMap(S, G.space, cols, shift=None)

    def psi_of_q(x):
        """Image of an R(M) element."""
        return mat(to_src(x))

    wd = CheckReport("well-defined")
    for x in KM.rows:
        for bd, part in x.components().items():
            g, bad = G.class_of(amb(part), target(bd))
            wd.expect(("Ker eta·R(M)", str(part)), not g and not bad, g, 0)
    for cgen in q.sub.rows:
        if _in_window(cgen, q.wt2_max):
            for bd, part in cgen.components().items():
                g, bad = G.class_of(part, target(bd))
                wd.expect(("C2(M)", str(part)), not g and not bad, g, 0)
    rep.add(wd)
    sur = CheckReport("surjective")
    sur.expect(("rank",), mat.rank() == G.space.dim, mat.rank(), G.space.dim)
    rep.add(sur)

    mo = CheckReport("module-morphism")
    eR = rv.space.unit_vector
    for a, b in iproduct(range(rv.space.dim), range(S.dim)):
        mb = q.space.unit_vector(q.space.pos(S.basis[b].id))
        def one(a=a, b=b, mb=mb):
            mo.expect_equal((rv.space.basis[a].id, S.basis[b].id),
                            psi_of_q(rm.action(eR(a), mb)), gm.action(et.matrix(eR(a)), mat(S.unit_vector(b))))
        run_tuple(mo, one)
    rep.add(mo)
    if gm.bracket is not None:
        bo = CheckReport("bracket-morphism")
        for a, b in iproduct(range(rv.space.dim), range(S.dim)):
            mb = q.space.unit_vector(q.space.pos(S.basis[b].id))
            def one(a=a, b=b, mb=mb):
                bo.expect_equal((rv.space.basis[a].id, S.basis[b].id),
                                psi_of_q(rm.bracket(eR(a), mb)),
                                gm.bracket(et.matrix(eR(a)), mat(S.unit_vector(b))))
            run_tuple(bo, one)
        rep.add(bo)
    ch = CheckReport("chain-map")
    for b in range(S.dim):
        mb = q.space.unit_vector(q.space.pos(S.basis[b].id))
        ch.expect_equal((S.basis[b].id,), psi_of_q(rm.d(mb)), gm.d(mat(S.unit_vector(b))))
    rep.add(ch)
    if gv == "W":
        fl = CheckReport("f-filtered")
        for b in range(S.dim):
            img = mat(S.unit_vector(b))
            top = max((G.f_level[G.space.basis[k].id] for k in img.c), default=None)
            fl.expect((S.basis[b].id,), top is None or top <= S.basis[b].deg, img,
                      f"F level <= {S.basis[b].deg}")
        rep.add(fl)

    adjoint = module.space is model.space
    layers = None
    if adjoint:
        layers = CheckReport("layers")
        bij = CheckReport("bijective")
        bij.expect(("rank",), mat.rank() == S.dim == G.space.dim, mat.rank(), (S.dim, G.space.dim))
        layers.add(bij)
        per = CheckReport("per-layer")
        wl, fl_ = G.w_level, G.f_level
        if gv == "F":
            # gr_* psi: W layers of the source against W levels of the target
            layer_bijective(mat, lambda b: b.wt2, lambda b: wl[b.id], per)
        elif gv == "W":
            # gr^[*] phi: F layers
            layer_bijective(mat, lambda b: b.deg, lambda b: fl_[b.id], per)
        else:
            layer_bijective(mat, lambda b: (b.deg, b.wt2), lambda b: (b.deg, b.wt2), per)
        layers.add(per)
        layers.finish()
    return NatTransform(variant, MorphismReport(variant, mat, rep.finish()), S, layers, adjoint)


# ---------------------------------------------------------------- maps between modules

def r_module_map(rm1: PoissonModulePresentation, rm2: PoissonModulePresentation, f: LinearMap,
                 rep: CheckReport = None) -> LinearMap:
    """R(f): class of m ↦ class of f(m); checks f(C2(M1)) ⊂ C2(M2)."""
    q1, q2 = rm1.quotient, rm2.quotient
    if rep is not None:
        for c in q1.sub.rows:
            if _in_window(c, q1.wt2_max):
                rep.expect((str(c),), q2.sub.contains(f(c)), f(c), "in C2")
    cols = {j: q2.project(f(r)) for j, r in enumerate(q1.reps)}
    return LinearMap(q1.space, q2.space, cols, shift=None)


def gr_module_map(g1: GrModulePresentation, g2: GrModulePresentation, f: LinearMap) -> LinearMap:
    """gr A(f) on the layers: class ↦ class of f(rep) at the same label."""
    cols = {}
    for j, r in enumerate(g1.view.Q.reps):
        g, _ = g2.view.class_of(f(r), g1.view.key(j))
        cols[j] = g
    return LinearMap(g1.space, g2.space, cols, shift=None)


def source_map(n1: NatTransform, n2: NatTransform, rmap: LinearMap) -> LinearMap:
    """R(f) pushed to the quotients R(M)/(Ker eta)R(M), on unit-vector representatives."""
    S1, S2 = n1.source, n2.source
    Q2 = rmap.target
    cols = {}
    for j, b in enumerate(S1.basis):
        img = rmap(rmap.source.unit_vector(rmap.source.pos(b.id)))
        # the source reps of n2 are unit vectors; map coordinates by id and reduce
        out = {}
        for k, c in img.c.items():
            bid = Q2.basis[k].id
            if bid in S2:
                out[S2.pos(bid)] = c
            else:
                raise NotInSubspace(img)
        cols[j] = Element(S2, out)
    return LinearMap(S1, S2, cols, shift=None)


# ---------------------------------------------------------------- cohomology module

@dataclass
class HModule:
    module: ModuleModel
    algebra_reps: list
    reps: list
    report: CheckReport


def h_module(model: VertexModel, module: ModuleModel) -> HModule:
    """Induced action of H(V) on H(M)."""
    hv = cohomology_vertex_report(model)
    coh = cohomology(module.complex())
    t = module.action
    entries = {}
    rep = CheckReport(f"h-module[{module.name}]")
    wd = CheckReport("well-defined")
    for a, ra in enumerate(hv.reps):
        for b, rb in enumerate(coh.reps):
            for n in range(t.n_lo, t.n_hi + 1):
                try:
                    z = t.apply(ra, n, rb)
                except OutOfWindow:
                    continue
                try:
                    cl = coh.project(z)
                except NotInSubspace as e:
                    wd.fail((str(ra), n, str(rb)), z, "cocycle", e.residue)
                    continue
                if cl:
                    entries[(a, n, b)] = cl.c
    for ra in hv.reps:
        for bnd in coh.coboundaries.rows:
            for n in range(t.n_lo, t.n_hi + 1):
                try:
                    z = t.apply(ra, n, bnd)
                    wd.expect_zero((str(ra), n, str(bnd)), coh.project(z))
                except OutOfWindow:
                    wd.skip()
                except NotInSubspace as e:
                    wd.fail((str(ra), n, str(bnd)), e.residue, 0)
    for bnd in cohomology(model.complex()).coboundaries.rows:
        for rb in coh.reps:
            for n in range(t.n_lo, t.n_hi + 1):
                try:
                    z = t.apply(bnd, n, rb)
                    wd.expect_zero((str(bnd), n, str(rb)), coh.project(z))
                except OutOfWindow:
                    wd.skip()
                except NotInSubspace as e:
                    wd.fail((str(bnd), n, str(rb)), e.residue, 0)
    rep.add(wd)
    grading = {j: b.wt2 for j, b in enumerate(coh.space.basis)}
    hm = ModuleModel(f"H({module.name})", hv.model, coh.space, entries, {}, (t.n_lo, t.n_hi), grading)
    return HModule(hm, hv.reps, coh.reps, rep.finish())
