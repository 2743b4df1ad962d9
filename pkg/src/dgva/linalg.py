"""Exact sparse linear algebra over bigraded bases.

Scalars are ``fractions.Fraction``. Weights are stored doubled (``wt2``) so
half-integer weights stay integral. Elements keep their coefficients keyed by
the position of the basis vector in the ambient space, which is also the
column order used for echelon pivoting.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from dgva import kernels as K


class AmbientMismatch(ValueError):
    pass


class OutOfWindow(LookupError):
    """Raised when a computation needs data outside the declared window."""


class NotInSubspace(ValueError):
    def __init__(self, residue):
        super().__init__("vector is not in the subspace")
        self.residue = residue


def Q(x) -> Fraction:
    """Coerce to an exact rational; rejects floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


def fmt_q(c: Fraction) -> str:
    c = Q(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def binom(m, i: int) -> Fraction:
    """Generalized binomial m(m-1)...(m-i+1)/i! for any rational m."""
    if i < 0:
        return Fraction(0)
    num = Fraction(1)
    for j in range(i):
        num = num * (m - j) / (j + 1)
    return num


@dataclass(frozen=True, order=True)
class Bidegree:
    deg: int
    wt2: int

    def __add__(self, other):
        return Bidegree(self.deg + other.deg, self.wt2 + other.wt2)

    def __sub__(self, other):
        return Bidegree(self.deg - other.deg, self.wt2 - other.wt2)

    @property
    def wt(self) -> Fraction:
        return Fraction(self.wt2, 2)

    def __str__(self):
        return f"({self.deg},{fmt_q(self.wt)})"


ZERO_SHIFT = Bidegree(0, 0)


@dataclass(frozen=True)
class BasisIndex:
    id: str
    bidegree: Bidegree

    @property
    def deg(self):
        return self.bidegree.deg

    @property
    def wt2(self):
        return self.bidegree.wt2


class GradedSpace:
    """A finite ordered bigraded basis plus its window.

    Components with weight above ``wt2_max`` (or degree outside
    ``deg_range``) are unknown unless the space is flagged ``exact``.
    ``wt2_max=None`` means no upper weight bound.
    """

    def __init__(self, basis: Sequence[BasisIndex], wt2_max=None, exact=False,
                 deg_range=None, name=""):
        self.basis = tuple(basis)
        self.name = name
        self.wt2_max = wt2_max
        self.exact = exact
        self.deg_range = deg_range
        self._pos = {}
        for i, b in enumerate(self.basis):
            if b.id in self._pos:
                raise ValueError(f"duplicate basis id {b.id!r}")
            self._pos[b.id] = i
        comps = {}
        for i, b in enumerate(self.basis):
            comps.setdefault(b.bidegree, []).append(i)
        self._comps = {k: tuple(v) for k, v in comps.items()}
        self.wt2_min = min((b.wt2 for b in self.basis), default=0)

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __contains__(self, bid):
        return bid in self._pos

    def pos(self, bid: str) -> int:
        try:
            return self._pos[bid]
        except KeyError:
            raise KeyError(f"unknown basis id {bid!r} in space {self.name!r}") from None

    def index(self, bid: str) -> BasisIndex:
        return self.basis[self.pos(bid)]

    def bidegrees(self):
        return sorted(self._comps)

    def component(self, bideg: Bidegree) -> tuple:
        """Positions of the basis vectors of the given bidegree."""
        return self._comps.get(bideg, ())

    def known(self, bideg: Bidegree) -> bool:
        if self.exact:
            return True
        if self.wt2_max is not None and bideg.wt2 > self.wt2_max:
            return False
        if self.deg_range is not None:
            lo, hi = self.deg_range
            if not lo <= bideg.deg <= hi:
                return False
        return True

    def positions_where(self, pred):
        return [i for i, b in enumerate(self.basis) if pred(b)]

    # element constructors
    def zero(self) -> "Element":
        return Element(self, {})

    def e(self, bid: str) -> "Element":
        return Element(self, {self.pos(bid): Fraction(1)})

    def unit_vector(self, i: int) -> "Element":
        return Element(self, {i: Fraction(1)})

    def vector(self, terms) -> "Element":
        """Element from a mapping (or pairs) of basis id -> scalar."""
        items = terms.items() if hasattr(terms, "items") else terms
        out = {}
        for bid, c in items:
            K.axpy(out, {self.pos(bid): Fraction(1)}, Q(c))
        return Element(self, out)

    def __repr__(self):
        return f"GradedSpace({self.name!r}, dim={self.dim})"


class Element:
    """A finite linear combination of basis vectors; treat as immutable."""

    __slots__ = ("space", "c")

    def __init__(self, space: GradedSpace, coeffs: dict):
        self.space = space
        self.c = coeffs

    @property
    def terms(self):
        b = self.space.basis
        return {b[i]: v for i, v in sorted(self.c.items())}

    def coeff(self, bid: str) -> Fraction:
        return self.c.get(self.space.pos(bid), Fraction(0))

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def _check(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.space is not self.space:
            raise AmbientMismatch(f"{self.space.name!r} vs {other.space.name!r}")
        return True

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.c)
        K.axpy(out, other.c, 1)
        return Element(self.space, out)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.c)
        K.axpy(out, other.c, -1)
        return Element(self.space, out)

    def __neg__(self):
        return Element(self.space, {k: -v for k, v in self.c.items()})

    def __rmul__(self, s):
        return Element(self.space, K.scaled(self.c, Q(s)))

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.space is other.space and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    # grading queries
    def bidegrees(self):
        b = self.space.basis
        return sorted({b[i].bidegree for i in self.c})

    def is_dg_homogeneous(self):
        return len({self.space.basis[i].deg for i in self.c}) <= 1

    def is_weight_homogeneous(self):
        return len({self.space.basis[i].wt2 for i in self.c}) <= 1

    def is_bihomogeneous(self):
        return len(self.bidegrees()) <= 1

    @property
    def deg(self):
        """Differential degree: the largest degree among the terms."""
        return max((self.space.basis[i].deg for i in self.c), default=None)

    @property
    def wt2(self):
        return max((self.space.basis[i].wt2 for i in self.c), default=None)

    def components(self):
        """Split into bihomogeneous parts, keyed by Bidegree."""
        out = {}
        b = self.space.basis
        for i, v in self.c.items():
            out.setdefault(b[i].bidegree, {})[i] = v
        return {k: Element(self.space, v) for k, v in sorted(out.items())}

    def restrict(self, pred):
        """The part whose basis vectors satisfy ``pred``."""
        b = self.space.basis
        return Element(self.space, {i: v for i, v in self.c.items() if pred(b[i])})

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for i, v in sorted(self.c.items()):
            parts.append(f"{fmt_q(v)}*{self.space.basis[i].id}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Element({self})"


def combine(pairs: Iterable) -> Element:
    """Sum of c * e over (c, e) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("combine needs at least one pair to know the space")
    space = pairs[0][1].space
    out = {}
    for c, e in pairs:
        if e.space is not space:
            raise AmbientMismatch(f"{space.name!r} vs {e.space.name!r}")
        K.axpy(out, e.c, Q(c))
    return Element(space, out)


class Subspace:
    """Span of vectors, kept in reduced row-echelon form."""

    def __init__(self, ambient: GradedSpace, ech: dict):
        self.ambient = ambient
        self._ech = ech
        self.pivots = tuple(sorted(ech))

    @property
    def rows(self):
        return [Element(self.ambient, self._ech[p]) for p in self.pivots]

    @property
    def dim(self):
        return len(self.pivots)

    def __len__(self):
        return self.dim

    def residue(self, v: Element) -> Element:
        if v.space is not self.ambient:
            raise AmbientMismatch("vector not in ambient space")
        return Element(self.ambient, K.reduce_row(v.c, self._ech))

    def contains(self, v: Element) -> bool:
        return not self.residue(v)

    __contains__ = contains

    def coordinates(self, v: Element):
        r = self.residue(v)
        if r:
            raise NotInSubspace(r)
        return {j: v.c[p] for j, p in enumerate(self.pivots) if p in v.c}

    def __add__(self, other):
        if other.ambient is not self.ambient:
            raise AmbientMismatch("subspaces over different spaces")
        ech = {p: dict(r) for p, r in self._ech.items()}
        for r in other._ech.values():
            K.echelon_insert(ech, r)
        return Subspace(self.ambient, ech)

    def extend(self, vectors):
        ech = {p: dict(r) for p, r in self._ech.items()}
        for v in vectors:
            if v.space is not self.ambient:
                raise AmbientMismatch("vector not in ambient space")
            K.echelon_insert(ech, v.c)
        return Subspace(self.ambient, ech)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and other.ambient is self.ambient
                and self._ech == other._ech)

    def is_subspace_of(self, other) -> bool:
        return all(other.contains(r) for r in self.rows)

    def component_dims(self):
        """Dimension of the part lying in each bidegree, when bihomogeneous."""
        out = {}
        for r in self.rows:
            bd = r.bidegrees()
            if len(bd) == 1:
                out[bd[0]] = out.get(bd[0], 0) + 1
        return out

    def __repr__(self):
        return f"Subspace(dim={self.dim} in {self.ambient.name!r})"


def zero_subspace(ambient: GradedSpace) -> Subspace:
    return Subspace(ambient, {})


def row_reduce(vectors: Sequence[Element], ambient: GradedSpace = None) -> Subspace:
    vectors = list(vectors)
    if ambient is None:
        if not vectors:
            raise ValueError("empty input needs an explicit ambient space")
        ambient = vectors[0].space
    for v in vectors:
        if v.space is not ambient:
            raise AmbientMismatch("vectors over different spaces")
    return Subspace(ambient, K.rref([v.c for v in vectors]))


class NotMember:
    def __init__(self, residue: Element):
        self.residue = residue

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotMember(residue={self.residue})"


def membership(v: Element, s: Subspace):
    """Coordinates of v in the echelon basis of s, or NotMember."""
    r = s.residue(v)
    if r:
        return NotMember(r)
    return {j: v.c[p] for j, p in enumerate(s.pivots) if p in v.c}


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b by the Zassenhaus stacking (x, x) / (y, 0)."""
    if a.ambient is not b.ambient:
        raise AmbientMismatch("subspaces over different spaces")
    n = a.ambient.dim
    rows = []
    for r in a._ech.values():
        row = dict(r)
        row.update({k + n: v for k, v in r.items()})
        rows.append(row)
    rows.extend(dict(r) for r in b._ech.values())
    ech = K.rref(rows)
    out = [{k - n: v for k, v in r.items()} for p, r in ech.items() if p >= n]
    return Subspace(a.ambient, K.rref(out))


def kernel(images: Sequence[dict], n_cols: int) -> list:
    """Basis of the kernel of the map e_j -> images[j] (rows over n_cols).

    Returns dicts over the domain index j.
    """
    rows = []
    for j, img in enumerate(images):
        row = dict(img)
        row[n_cols + j] = Fraction(1)
        rows.append(row)
    ech = K.rref(rows)
    return [{k - n_cols: v for k, v in r.items()} for p, r in ech.items() if p >= n_cols]


def rank(vectors) -> int:
    return len(K.rref([v.c if isinstance(v, Element) else v for v in vectors]))


class LinearMap:
    """A linear map given by the images of source basis vectors.

    ``shift`` is the bidegree shift, asserted column by column; pass None
    for maps that are only filtered (e.g. projections onto a quotient).
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, columns: dict, shift=ZERO_SHIFT):
        self.source = source
        self.target = target
        self.shift = shift
        self.columns = {}
        for i, img in columns.items():
            if isinstance(i, str):
                i = source.pos(i)
            if img.space is not target:
                raise AmbientMismatch("column not in target space")
            if img and shift is not None:
                want = source.basis[i].bidegree + shift
                for bd in img.bidegrees():
                    if bd != want:
                        raise ValueError(
                            f"column {source.basis[i].id} has bidegree {bd}, expected {want}")
            if img:
                self.columns[i] = img

    def __call__(self, v: Element) -> Element:
        if v.space is not self.source:
            raise AmbientMismatch("argument not in source space")
        out = {}
        for i, c in v.c.items():
            img = self.columns.get(i)
            if img is not None:
                K.axpy(out, img.c, c)
        return Element(self.target, out)

    def column(self, i) -> Element:
        if isinstance(i, str):
            i = self.source.pos(i)
        return self.columns.get(i) or self.target.zero()

    def rank(self) -> int:
        return rank(list(self.columns.values()))

    def kernel(self):
        imgs = [self.column(i).c for i in range(self.source.dim)]
        return [Element(self.source, r) for r in kernel(imgs, self.target.dim)]

    def is_surjective(self):
        return self.rank() == self.target.dim

    def is_injective(self):
        return self.rank() == self.source.dim

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self ∘ other."""
        if other.target is not self.source:
            raise AmbientMismatch("maps do not compose")
        shift = None if self.shift is None or other.shift is None else self.shift + other.shift
        cols = {i: self(img) for i, img in other.columns.items()}
        return LinearMap(other.source, self.target, cols, shift)

    def matrix_rows(self):
        """Dense rows (target x source) for reports and tests."""
        m = [[Fraction(0)] * self.source.dim for _ in range(self.target.dim)]
        for j, img in self.columns.items():
            for i, v in img.c.items():
                m[i][j] = v
        return m


@dataclass
class QuotientPresentation:
    """ambient / sub with the non-pivot basis vectors as complement."""

    ambient: GradedSpace
    sub: Subspace
    space: GradedSpace
    complement: tuple  # ambient positions of the complement basis

    def project(self, v: Element) -> Element:
        r = self.sub.residue(v)
        back = self._back
        return Element(self.space, {back[i]: c for i, c in r.c.items()})

    def lift(self, q: Element) -> Element:
        if q.space is not self.space:
            raise AmbientMismatch("not a quotient element")
        return Element(self.ambient, {self.complement[j]: c for j, c in q.c.items()})

    @property
    def _back(self):
        return {p: j for j, p in enumerate(self.complement)}

    def projection(self) -> LinearMap:
        cols = {i: self.project(self.ambient.unit_vector(i)) for i in range(self.ambient.dim)}
        homog = all(r.is_bihomogeneous() for r in self.sub.rows)
        return LinearMap(self.ambient, self.space, cols, ZERO_SHIFT if homog else None)

    def section(self) -> LinearMap:
        cols = {j: self.lift(self.space.unit_vector(j)) for j in range(self.space.dim)}
        return LinearMap(self.space, self.ambient, cols, ZERO_SHIFT)


def quotient_present(ambient: GradedSpace, s: Subspace, name=None) -> QuotientPresentation:
    if s.ambient is not ambient:
        raise AmbientMismatch("subspace not in this space")
    piv = set(s.pivots)
    comp = tuple(i for i in range(ambient.dim) if i not in piv)
    space = GradedSpace([ambient.basis[i] for i in comp], wt2_max=ambient.wt2_max,
                        exact=ambient.exact, name=name or f"{ambient.name}/~")
    return QuotientPresentation(ambient, s, space, comp)


class Subquotient:
    """span(generators) + bottom, modulo bottom.

    Representatives are chosen greedily among the generators in the given
    order, so listing nice (e.g. bihomogeneous) generators first gives nice
    representatives. ``coords`` expresses a vector of the top space in the
    representative basis.
    """

    def __init__(self, generators: Sequence[Element], bottom: Subspace):
        self.ambient = bottom.ambient
        self.bottom = bottom
        n = self.ambient.dim
        self._n = n
        ech = {}
        reps = []
        for g in generators:
            r = K.reduce_row(g.c, bottom._ech)
            if not r:
                continue
            r[n + len(reps)] = Fraction(1)
            if K.echelon_insert(ech, r, n) is not None:
                reps.append(g)
        self._ech = ech
        self.reps = reps

    @property
    def dim(self):
        return len(self.reps)

    def coords(self, v: Element) -> list:
        """Coefficients c with v = sum c_j reps_j (mod bottom)."""
        r = K.reduce_row(v.c, self.bottom._ech)
        r = K.reduce_row(r, self._ech)
        n = self._n
        if any(k < n for k in r):
            raise NotInSubspace(Element(self.ambient, {k: c for k, c in r.items() if k < n}))
        out = [Fraction(0)] * len(self.reps)
        for k, c in r.items():
            out[k - n] = -c
        return out

    def contains(self, v: Element) -> bool:
        try:
            self.coords(v)
            return True
        except NotInSubspace:
            return False

    def top(self) -> Subspace:
        return self.bottom.extend(self.reps)
