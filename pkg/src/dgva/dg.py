"""Complexes, dg algebras, degree-p dg Lie and dg Poisson checks, filtrations.

Every check quantifies over basis tuples (bilinearity makes that complete)
and skips tuples that need data outside the window, counting the skips.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Optional

from dgva import kernels as K
from dgva.linalg import (
    Bidegree, BasisIndex, Element, GradedSpace, LinearMap, OutOfWindow, Subquotient,
    Subspace, ZERO_SHIFT, intersect, kernel, row_reduce, zero_subspace, NotInSubspace,
)

MAX_WITNESSES = 5


def sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass
class Witness:
    inputs: tuple
    lhs: object
    rhs: object
    difference: object

    def __str__(self):
        ins = ", ".join(str(x) for x in self.inputs)
        return f"({ins}): lhs={self.lhs} rhs={self.rhs} diff={self.difference}"


@dataclass
class CheckReport:
    name: str
    status: str = "pass"
    checked: int = 0
    skipped: int = 0
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    parts: list = field(default_factory=list)
    failures: int = 0

    def ok(self, n=1):
        self.checked += n

    def skip(self, n=1):
        self.skipped += n

    def fail(self, inputs, lhs, rhs=None, difference=None):
        self.checked += 1
        self.failures += 1
        self.status = "fail"
        if len(self.witnesses) < MAX_WITNESSES:
            if difference is None and isinstance(lhs, Element) and isinstance(rhs, Element):
                difference = lhs - rhs
            self.witnesses.append(Witness(tuple(inputs), lhs, rhs, difference))

    def expect_equal(self, inputs, lhs, rhs):
        if lhs == rhs:
            self.checked += 1
            return True
        self.fail(inputs, lhs, rhs)
        return False

    def expect_zero(self, inputs, value):
        if not value:
            self.checked += 1
            return True
        self.fail(inputs, value, 0, value)
        return False

    def expect(self, inputs, cond, lhs=None, rhs=None):
        if cond:
            self.checked += 1
            return True
        self.fail(inputs, lhs, rhs)
        return False

    def add(self, part: "CheckReport") -> "CheckReport":
        part.finish()
        self.parts.append(part)
        if part.status == "fail":
            self.status = "fail"
        return part

    def finish(self):
        if self.status != "fail" and self.checked == 0 and self.skipped > 0 and not self.parts:
            self.status = "skipped"
        return self

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def first_witness(self):
        if self.witnesses:
            return self.witnesses[0]
        for p in self.parts:
            w = p.first_witness()
            if w is not None:
                return w
        return None

    def walk(self, depth=0):
        yield depth, self
        for p in self.parts:
            yield from p.walk(depth + 1)

    def coverage(self):
        tot = self.checked + self.skipped
        return 1.0 if tot == 0 else self.checked / tot

    def __str__(self):
        lines = []
        for depth, r in self.walk():
            lines.append(f"{'  ' * depth}{r.name}: {r.status} (checked={r.checked}, skipped={r.skipped})")
            for w in r.witnesses:
                lines.append(f"{'  ' * depth}  witness {w}")
        return "\n".join(lines)


def run_tuple(rep: CheckReport, fn, *args):
    """Call fn(*args); count an OutOfWindow as a skip."""
    try:
        fn(*args)
    except OutOfWindow:
        rep.skip()


class ProductTable:
    """A bilinear operation on basis vectors.

    ``entries[(i, j)]`` is a coefficient dict over ``out``. With
    ``partial=True`` a missing entry means unknown (outside the window);
    otherwise it means zero.
    """

    def __init__(self, left: GradedSpace, right: GradedSpace, out: GradedSpace, entries: dict,
                 shift: Optional[Bidegree] = ZERO_SHIFT, partial=False, name=""):
        self.left, self.right, self.out = left, right, out
        self.entries = entries
        self.shift = shift
        self.partial = partial
        self.name = name

    def entry(self, i, j) -> dict:
        e = self.entries.get((i, j))
        if e is None:
            if self.partial:
                raise OutOfWindow(f"{self.name} entry ({self.left.basis[i].id}, {self.right.basis[j].id})")
            return {}
        return e

    def known(self, i, j) -> bool:
        return not self.partial or (i, j) in self.entries

    def apply(self, x: Element, y: Element) -> Element:
        out = {}
        for i, a in x.c.items():
            for j, b in y.c.items():
                e = self.entry(i, j)
                if e:
                    K.axpy(out, e, a * b)
        return Element(self.out, out)

    __call__ = apply

    def check_shift(self, rep: CheckReport):
        if self.shift is None:
            return
        for (i, j), e in self.entries.items():
            want = self.left.basis[i].bidegree + self.right.basis[j].bidegree + self.shift
            bad = [k for k in e if self.out.basis[k].bidegree != want]
            if bad:
                rep.fail((self.left.basis[i].id, self.right.basis[j].id),
                         Element(self.out, e), f"bidegree {want}")
            else:
                rep.ok()


@dataclass
class Complex:
    space: GradedSpace
    d: LinearMap
    unknown: frozenset = frozenset()

    def apply(self, v: Element) -> Element:
        if any(i in self.unknown for i in v.c):
            raise OutOfWindow("differential outside window")
        return self.d(v)


def zero_complex(space: GradedSpace) -> Complex:
    return Complex(space, LinearMap(space, space, {}, Bidegree(1, 0)))


@dataclass
class FiltrationSpec:
    """F (by degree) or W (by doubled weight) filtration given by basis levels."""

    kind: str
    level: Callable

    def __post_init__(self):
        if self.kind not in ("F", "W"):
            raise ValueError("kind must be 'F' or 'W'")

    def levels(self, space):
        return sorted({self.level(b) for b in space.basis})

    def layer(self, space, i):
        """Positions of basis vectors with level <= i."""
        return [k for k, b in enumerate(space.basis) if self.level(b) <= i]

    def of(self, v: Element):
        """Filtration level of an element (max over its terms), None for 0."""
        return max((self.level(v.space.basis[k]) for k in v.c), default=None)


def degree_filtration():
    return FiltrationSpec("F", lambda b: b.deg)


def weight_filtration():
    return FiltrationSpec("W", lambda b: b.wt2)


# ---------------------------------------------------------------- complexes

def check_complex(c: Complex, want_shift=Bidegree(1, 0)) -> CheckReport:
    rep = CheckReport("complex")
    sp = c.space
    shift = CheckReport("differential-shift")
    dd = CheckReport("d∘d=0")
    for i, b in enumerate(sp.basis):
        if i in c.unknown:
            shift.skip()
            dd.skip()
            continue
        img = c.d.column(i)
        bad = [bd for bd in img.bidegrees() if bd != b.bidegree + want_shift]
        if bad:
            shift.fail((b.id,), img, f"bidegree {b.bidegree + want_shift}")
        else:
            shift.ok()
        try:
            dd.expect_zero((b.id,), c.apply(img))
        except OutOfWindow:
            dd.skip()
    rep.add(shift)
    rep.add(dd)
    return rep.finish()


@dataclass
class Cohomology:
    space: GradedSpace          # H with one basis vector per representative
    reps: list                  # cocycle representatives in the complex
    cocycles: Subspace
    coboundaries: Subspace
    quotient: Subquotient

    def project(self, z: Element) -> Element:
        """Class of a cocycle z; raises NotInSubspace if z is not closed."""
        co = self.quotient.coords(z)
        return Element(self.space, {j: x for j, x in enumerate(co) if x})

    def section(self) -> LinearMap:
        amb = self.cocycles.ambient
        return LinearMap(self.space, amb, {j: r for j, r in enumerate(self.reps)}, ZERO_SHIFT)


def cohomology(c: Complex) -> Cohomology:
    """Per-bidegree ker d / im d with bihomogeneous cocycle representatives."""
    sp = c.space
    if c.unknown:
        raise OutOfWindow("cohomology needs the differential on the whole window")
    zrows = []
    for bd in sp.bidegrees():
        comp = sp.component(bd)
        imgs = [c.d.column(i).c for i in comp]
        for r in kernel(imgs, sp.dim):
            zrows.append(Element(sp, {comp[j]: v for j, v in r.items()}))
    Z = row_reduce(zrows, sp)
    B = row_reduce([c.d.column(i) for i in range(sp.dim)], sp)
    sq = Subquotient(Z.rows, B)
    reps = sq.reps
    basis = []
    for r in reps:
        lead = sp.basis[min(r.c)]
        basis.append(BasisIndex(lead.id, lead.bidegree))
    H = GradedSpace(basis, wt2_max=sp.wt2_max, exact=sp.exact, name=f"H({sp.name})")
    return Cohomology(H, reps, Z, B, sq)


# ---------------------------------------------------------------- dg algebra / Lie / Poisson

def _deg(sp, i):
    return sp.basis[i].deg


def check_dg_algebra(c: Complex, m: ProductTable, assoc=False, comm=False, unit=None,
                     name="dg-algebra") -> CheckReport:
    """Leibniz rule for d, optionally associativity, graded commutativity, unit."""
    rep = CheckReport(name)
    sp = c.space
    n = sp.dim
    e = sp.unit_vector
    homog = CheckReport("product-bidegree")
    m.check_shift(homog)
    rep.add(homog)

    leib = CheckReport("leibniz")
    for i, j in iproduct(range(n), repeat=2):
        def one(i=i, j=j):
            x, y = e(i), e(j)
            lhs = c.apply(m(x, y))
            rhs = m(c.apply(x), y) + sign(_deg(sp, i)) * m(x, c.apply(y))
            leib.expect_equal((sp.basis[i].id, sp.basis[j].id), lhs, rhs)
        run_tuple(leib, one)
    rep.add(leib)

    if comm:
        cm = CheckReport("graded-commutativity")
        for i, j in iproduct(range(n), repeat=2):
            def one(i=i, j=j):
                x, y = e(i), e(j)
                cm.expect_equal((sp.basis[i].id, sp.basis[j].id), m(x, y),
                                sign(_deg(sp, i) * _deg(sp, j)) * m(y, x))
            run_tuple(cm, one)
        rep.add(cm)
    if assoc:
        asc = CheckReport("associativity")
        for i, j, k in iproduct(range(n), repeat=3):
            def one(i=i, j=j, k=k):
                x, y, z = e(i), e(j), e(k)
                asc.expect_equal((sp.basis[i].id, sp.basis[j].id, sp.basis[k].id),
                                 m(m(x, y), z), m(x, m(y, z)))
            run_tuple(asc, one)
        rep.add(asc)
    if unit is not None:
        un = CheckReport("unit")
        for i in range(n):
            def one(i=i):
                x = e(i)
                un.expect_equal((sp.basis[i].id, "left"), m(unit, x), x)
                un.expect_equal((sp.basis[i].id, "right"), m(x, unit), x)
            run_tuple(un, one)
        rep.add(un)
    return rep.finish()


def _odd_note(rep, p):
    if p % 2:
        rep.notes.append("odd bracket degree p: displayed signs applied literally")


def check_dg_lie(c: Complex, bracket: ProductTable, p: int, name="dg-lie") -> CheckReport:
    """Skew symmetry, Jacobi identity and cocycle condition for degree p."""
    rep = CheckReport(name)
    _odd_note(rep, p)
    sp = c.space
    n = sp.dim
    e = sp.unit_vector
    br = bracket
    homog = CheckReport("bracket-bidegree")
    if br.shift is not None and br.shift.deg != p:
        homog.fail(("shift",), br.shift.deg, p)
    br.check_shift(homog)
    rep.add(homog)

    skew = CheckReport("skew-symmetry")
    for i, j in iproduct(range(n), repeat=2):
        def one(i=i, j=j):
            s = sign((_deg(sp, i) + p) * (_deg(sp, j) + p))
            skew.expect_equal((sp.basis[i].id, sp.basis[j].id), br(e(i), e(j)), -s * br(e(j), e(i)))
        run_tuple(skew, one)
    rep.add(skew)

    jac = CheckReport("jacobi")
    for i, j, k in iproduct(range(n), repeat=3):
        def one(i=i, j=j, k=k):
            x, y, z = e(i), e(j), e(k)
            s = sign((_deg(sp, i) + p) * (_deg(sp, j) + p))
            lhs = br(x, br(y, z))
            rhs = br(br(x, y), z) + s * br(y, br(x, z))
            jac.expect_equal((sp.basis[i].id, sp.basis[j].id, sp.basis[k].id), lhs, rhs)
        run_tuple(jac, one)
    rep.add(jac)

    coc = CheckReport("cocycle")
    for i, j in iproduct(range(n), repeat=2):
        def one(i=i, j=j):
            x, y = e(i), e(j)
            lhs = c.apply(br(x, y))
            rhs = sign(p) * br(c.apply(x), y) + sign(_deg(sp, i) + p) * br(x, c.apply(y))
            coc.expect_equal((sp.basis[i].id, sp.basis[j].id), lhs, rhs)
        run_tuple(coc, one)
    rep.add(coc)
    return rep.finish()


def check_dg_poisson(c: Complex, m: ProductTable, bracket: ProductTable, p: int,
                     name="dg-poisson", full=True) -> CheckReport:
    """Leibniz compatibility {a, xy} = {a,x}y + (-1)^{(|a|+p)|x|} x{a,y}.

    With ``full`` the dg algebra and dg Lie checks run first as parts.
    """
    rep = CheckReport(name)
    _odd_note(rep, p)
    if full:
        rep.add(check_dg_algebra(c, m, assoc=True, comm=True, name="dg-algebra"))
        rep.add(check_dg_lie(c, bracket, p, name="dg-lie"))
    sp = c.space
    n = sp.dim
    e = sp.unit_vector
    comp = CheckReport("poisson-leibniz")
    for i, j, k in iproduct(range(n), repeat=3):
        def one(i=i, j=j, k=k):
            a, x, y = e(i), e(j), e(k)
            lhs = bracket(a, m(x, y))
            rhs = m(bracket(a, x), y) + sign((_deg(sp, i) + p) * _deg(sp, j)) * m(x, bracket(a, y))
            comp.expect_equal((sp.basis[i].id, sp.basis[j].id, sp.basis[k].id), lhs, rhs)
        run_tuple(comp, one)
    rep.add(comp)
    return rep.finish()


def check_dg_poisson_module(cR: Complex, m: ProductTable, br: ProductTable,
                            cM: Complex, act: ProductTable, bract: ProductTable, p: int,
                            unit=None, name="dg-poisson-module") -> CheckReport:
    """The four families for a dg Poisson module over a dg Poisson algebra."""
    rep = CheckReport(name)
    _odd_note(rep, p)
    R, M = cR.space, cM.space
    eR, eM = R.unit_vector, M.unit_vector
    nR, nM = R.dim, M.dim
    ids = lambda *t: tuple(s.basis[i].id for s, i in t)

    dgm = CheckReport("dg-module")
    for i, j, k in iproduct(range(nR), range(nR), range(nM)):
        def one(i=i, j=j, k=k):
            r1, r2, x = eR(i), eR(j), eM(k)
            dgm.expect_equal(ids((R, i), (R, j), (M, k)), act(m(r1, r2), x), act(r1, act(r2, x)))
        run_tuple(dgm, one)
    for i, k in iproduct(range(nR), range(nM)):
        def one(i=i, k=k):
            r, x = eR(i), eM(k)
            lhs = cM.apply(act(r, x))
            rhs = act(cR.apply(r), x) + sign(_deg(R, i)) * act(r, cM.apply(x))
            dgm.expect_equal(ids((R, i), (M, k)) + ("d",), lhs, rhs)
        run_tuple(dgm, one)
    if unit is not None:
        for k in range(nM):
            run_tuple(dgm, lambda k=k: dgm.expect_equal((M.basis[k].id, "unit"), act(unit, eM(k)), eM(k)))
    rep.add(dgm)

    lie = CheckReport("dg-lie-module")
    for i, j, k in iproduct(range(nR), range(nR), range(nM)):
        def one(i=i, j=j, k=k):
            r1, r2, x = eR(i), eR(j), eM(k)
            s = sign((_deg(R, i) + p) * (_deg(R, j) + p))
            lhs = bract(r1, bract(r2, x)) - s * bract(r2, bract(r1, x))
            lie.expect_equal(ids((R, i), (R, j), (M, k)), lhs, bract(br(r1, r2), x))
        run_tuple(lie, one)
    for i, k in iproduct(range(nR), range(nM)):
        def one(i=i, k=k):
            r, x = eR(i), eM(k)
            lhs = cM.apply(bract(r, x))
            rhs = sign(p) * bract(cR.apply(r), x) + sign(_deg(R, i) + p) * bract(r, cM.apply(x))
            lie.expect_equal(ids((R, i), (M, k)) + ("d",), lhs, rhs)
        run_tuple(lie, one)
    rep.add(lie)

    l1 = CheckReport("bracket-over-action")
    l2 = CheckReport("action-in-bracket")
    for i, j, k in iproduct(range(nR), range(nR), range(nM)):
        def one(i=i, j=j, k=k):
            r1, r2, x = eR(i), eR(j), eM(k)
            lhs = bract(r1, act(r2, x))
            rhs = act(br(r1, r2), x) + sign((_deg(R, i) + p) * _deg(R, j)) * act(r2, bract(r1, x))
            l1.expect_equal(ids((R, i), (R, j), (M, k)), lhs, rhs)

        def two(i=i, j=j, k=k):
            r1, r2, x = eR(i), eR(j), eM(k)
            lhs = bract(m(r1, r2), x)
            rhs = act(r1, bract(r2, x)) + sign(_deg(R, i) * _deg(R, j)) * act(r2, bract(r1, x))
            l2.expect_equal(ids((R, i), (R, j), (M, k)), lhs, rhs)
        run_tuple(l1, one)
        run_tuple(l2, two)
    rep.add(l1)
    rep.add(l2)
    return rep.finish()


def level_of(v: Element, F: FiltrationSpec):
    return F.of(v)


def check_diff_filtered_algebra(space: GradedSpace, F: FiltrationSpec, m: ProductTable,
                                d: LinearMap, comm=True, name="diff-filtered") -> CheckReport:
    """Filtered product, d raising level by <= 1, Leibniz and df-commutativity defects.

    Levels are read off an adapted basis: F^i is the span of basis vectors
    with level <= i.
    """
    rep = CheckReport(name)
    n = space.dim
    e = space.unit_vector
    lev = lambda i: F.level(space.basis[i])

    def below(v, bound):
        L = F.of(v)
        return L is None or L <= bound

    filt = CheckReport("filtered-product")
    leib = CheckReport("leibniz-defect")
    dfc = CheckReport("df-commutativity")
    dlev = CheckReport("d-level")
    for i in range(n):
        dlev.expect((space.basis[i].id,), below(d(e(i)), lev(i) + 1), d(e(i)), f"level <= {lev(i) + 1}")
    for i, j in iproduct(range(n), repeat=2):
        ids = (space.basis[i].id, space.basis[j].id)

        def one(i=i, j=j, ids=ids):
            x, y = e(i), e(j)
            xy = m(x, y)
            filt.expect(ids, below(xy, lev(i) + lev(j)), xy, f"level <= {lev(i) + lev(j)}")
            defect = d(xy) - (m(d(x), y) + sign(lev(i)) * m(x, d(y)))
            leib.expect(ids, below(defect, lev(i) + lev(j)), defect, f"level <= {lev(i) + lev(j)}")
            if comm:
                cd = xy - sign(lev(i) * lev(j)) * m(y, x)
                dfc.expect(ids, below(cd, lev(i) + lev(j) - 1), cd, f"level <= {lev(i) + lev(j) - 1}")
        try:
            one()
        except OutOfWindow:
            filt.skip()
            leib.skip()
            if comm:
                dfc.skip()
    for part in (filt, dlev, leib) + ((dfc,) if comm else ()):
        rep.add(part)
    return rep.finish()


# ---------------------------------------------------------------- double gr

@dataclass
class GradedPresentation:
    """An associated graded object: blocks keyed by (F level, W level)."""

    space: GradedSpace
    reps: list                 # representative in the ambient per basis vector
    blocks: dict               # (i, n) -> list of positions in ``space``
    product: Optional[ProductTable]
    d: Optional[LinearMap]
    quotients: dict            # (i, n) -> Subquotient


@dataclass
class MorphismReport:
    name: str
    matrix: LinearMap
    report: CheckReport

    @property
    def rank(self):
        return self.matrix.rank()

    @property
    def surjective(self):
        return self.matrix.is_surjective()

    @property
    def injective(self):
        return self.matrix.is_injective()

    @property
    def bijective(self):
        return self.surjective and self.injective

    @property
    def passed(self):
        return self.report.passed


def _filtration_spaces(space, F, ideal):
    """Level -> subspace (span of basis with level <= i) + ideal."""
    out = {}
    levels = F.levels(space)
    base = ideal if ideal is not None else zero_subspace(space)
    for i in levels:
        out[i] = base.extend([space.unit_vector(k) for k in F.layer(space, i)])
    return levels, out, base


def _prev(levels, subs, i, base):
    k = levels.index(i)
    return subs[levels[k - 1]] if k > 0 else base


def _at(levels, subs, i, base):
    """Filtration piece at an arbitrary level (clamped to the known levels)."""
    best = None
    for l in levels:
        if l <= i:
            best = l
    return base if best is None else subs[best]


def _chain(space, F, W, ideal, product, d, order):
    Fl, Fs, base = _filtration_spaces(space, F, ideal)
    Wl, Ws, _ = _filtration_spaces(space, W, ideal)
    cap = {}
    for i in Fl:
        for n in Wl:
            cap[(i, n)] = intersect(Fs[i], Ws[n])
    basis, reps, blocks, quots = [], [], {}, {}
    for i in Fl:
        for n in Wl:
            X = cap[(i, n)]
            if order == "FW":
                top_extra = _prev(Fl, Fs, i, base)
                bottom = intersect(Fs[i], _prev(Wl, Ws, n, base)) + top_extra
            else:
                top_extra = _prev(Wl, Ws, n, base)
                bottom = intersect(_prev(Fl, Fs, i, base), Ws[n]) + top_extra
            homog = [space.unit_vector(k) for k, b in enumerate(space.basis)
                     if F.level(b) == i and W.level(b) == n]
            gens = homog + X.rows if order == "FW" else X.rows + homog
            sq = Subquotient(gens, bottom)
            quots[(i, n)] = sq
            if sq.dim:
                blocks[(i, n)] = list(range(len(basis), len(basis) + sq.dim))
                for k, r in enumerate(sq.reps):
                    basis.append(BasisIndex(f"g{i}_{n}_{k}", Bidegree(i, n)))
                    reps.append(r)
    gsp = GradedSpace(basis, name=f"gr{order}")
    block_of = {}
    for key, poss in blocks.items():
        for k, pos in enumerate(poss):
            block_of[pos] = (key, k)

    def coords_at(v, key):
        sq = quots.get(key)
        if sq is None:
            raise NotInSubspace(v)
        co = sq.coords(v)
        poss = blocks.get(key, [])
        return {poss[k]: c for k, c in enumerate(co) if c}

    prod = None
    if product is not None:
        entries = {}
        for a in range(len(basis)):
            for b in range(len(basis)):
                (ka, _), (kb, _) = block_of[a], block_of[b]
                key = (ka[0] + kb[0], ka[1] + kb[1])
                try:
                    z = product(reps[a], reps[b])
                except OutOfWindow:
                    continue
                if key not in quots:
                    # the target layer is zero; the product must vanish there
                    if z and not _contained(z, Fs, Ws, Fl, Wl, key, base):
                        raise ValueError(f"product not filtered at {basis[a].id}*{basis[b].id}")
                    entries[(a, b)] = {}
                    continue
                try:
                    entries[(a, b)] = coords_at(z, key)
                except NotInSubspace:
                    raise ValueError(f"product not filtered at {basis[a].id}*{basis[b].id}")
        prod = ProductTable(gsp, gsp, gsp, entries, shift=ZERO_SHIFT, partial=True, name=f"gr{order}*")
    dmap = None
    if d is not None:
        cols = {}
        for a in range(len(basis)):
            ka, _ = block_of[a]
            key = (ka[0] + 1, ka[1])
            z = d(reps[a])
            if key in quots:
                cols[a] = Element(gsp, coords_at(z, key))
            elif z and not _contained(z, Fs, Ws, Fl, Wl, key, base):
                raise ValueError("differential not filtered")
        dmap = LinearMap(gsp, gsp, cols, Bidegree(1, 0))
    return GradedPresentation(gsp, reps, blocks, prod, dmap, quots)


def _contained(z, Fs, Ws, Fl, Wl, key, base):
    """Is z in the bottom of the (i, n) layer, i.e. zero in that layer?"""
    i, n = key
    Fi = _at(Fl, Fs, i, base)
    Fi1 = _at(Fl, Fs, i - 1, base)
    Wn1 = _at(Wl, Ws, n - 1, base)
    bottom = intersect(Fi, Wn1) + Fi1
    return bottom.contains(z)


def double_gr(space: GradedSpace, F: FiltrationSpec, W: FiltrationSpec, product=None, d=None,
              ideal: Subspace = None):
    """gr_n gr^[i] and gr^[i] gr_n of space/ideal, computed independently.

    Returns (presentation F-then-W, presentation W-then-F, MorphismReport of
    the canonical identification induced by F^i ∩ W_n).
    """
    fw = _chain(space, F, W, ideal, product, d, "FW")
    wf = _chain(space, F, W, ideal, product, d, "WF")
    rep = CheckReport("double-gr identification")
    cols = {}
    dims = CheckReport("layer-dimensions")
    for key in sorted(set(fw.quotients) | set(wf.quotients)):
        a = fw.quotients[key].dim if key in fw.quotients else 0
        b = wf.quotients[key].dim if key in wf.quotients else 0
        dims.expect_equal((key,), a, b)
    rep.add(dims)
    wf_pos = wf.blocks
    for key, poss in fw.blocks.items():
        for k, pos in enumerate(poss):
            co = wf.quotients[key].coords(fw.reps[pos])
            cols[pos] = Element(wf.space, {wf_pos[key][j]: c for j, c in enumerate(co) if c})
    iso = LinearMap(fw.space, wf.space, cols, shift=None)
    bij = CheckReport("bijective")
    bij.expect(("rank",), iso.rank() == fw.space.dim == wf.space.dim, iso.rank(), fw.space.dim)
    rep.add(bij)
    if fw.product is not None:
        mp = CheckReport("product-compatible")
        n = fw.space.dim
        e = fw.space.unit_vector
        for a in range(n):
            for b in range(n):
                def one(a=a, b=b):
                    lhs = iso(fw.product(e(a), e(b)))
                    rhs = wf.product(iso(e(a)), iso(e(b)))
                    mp.expect_equal((fw.space.basis[a].id, fw.space.basis[b].id), lhs, rhs)
                run_tuple(mp, one)
        rep.add(mp)
    if fw.d is not None:
        dc = CheckReport("differential-compatible")
        for a in range(fw.space.dim):
            x = fw.space.unit_vector(a)
            dc.expect_equal((fw.space.basis[a].id,), iso(fw.d(x)), wf.d(iso(x)))
        rep.add(dc)
    return fw, wf, MorphismReport("double-gr", iso, rep.finish())
