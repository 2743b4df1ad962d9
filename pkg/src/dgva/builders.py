"""Example models: the free boson on Fock space, Borcherds' e^{xD} construction.

The Heisenberg builder never touches the Jacobi machinery: its table comes
from annihilation/creation operators on partitions and normal-ordered
products of derivative fields, so it serves as an independent oracle.
"""
from __future__ import annotations

from fractions import Fraction

from dgva import kernels as K
from dgva.linalg import Bidegree, BasisIndex, GradedSpace, binom
from dgva.vertex import VertexModel


# ---------------------------------------------------------------- partitions / Fock space

def partitions(n: int, largest=None):
    """Partitions of n as weakly decreasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal recurrence (independent of the enumerator)."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        s, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sg = 1 if k % 2 else -1
            s += sg * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                s += sg * p[m - g2]
            k += 1
        p[m] = s
    return p[n]


def fock_id(lam) -> str:
    return "vac" if not lam else "".join(f"a{k}" for k in lam)


def _create(state: dict, k: int) -> dict:
    """alpha_{-k}, k > 0."""
    out = {}
    for lam, c in state.items():
        new = tuple(sorted(lam + (k,), reverse=True))
        out[new] = out.get(new, 0) + c
    return out


def _annihilate(state: dict, k: int) -> dict:
    """alpha_k, k > 0: [alpha_k, alpha_{-k}] = k."""
    out = {}
    for lam, c in state.items():
        mult = lam.count(k)
        if mult:
            lst = list(lam)
            lst.remove(k)
            new = tuple(lst)
            v = out.get(new, 0) + c * k * mult
            if v:
                out[new] = v
            else:
                out.pop(new, None)
    return out


def _field_part(state: dict, n: int, annihilate: bool, max_out_wt) -> dict:
    """Apply the creation or annihilation half of d^(n)alpha(x).

    ``state`` maps (x-power, partition) -> coefficient. The field is
    d^(n)alpha(x) = sum_k C(-k-1, n) alpha_k x^{-k-1-n}; alpha_0 acts by 0.
    """
    out = {}
    for (e, lam), c in state.items():
        if annihilate:
            for k in set(lam):
                co = binom(-k - 1, n)
                if not co:
                    continue
                for lam2, c2 in _annihilate({lam: 1}, k).items():
                    key = (e - k - 1 - n, lam2)
                    out[key] = out.get(key, 0) + c * c2 * co
        else:
            room = (max_out_wt - sum(lam)) if max_out_wt is not None else None
            for k in range(1, (room if room is not None else 0) + 1):
                co = binom(k - 1, n)
                if not co:
                    continue
                lam2 = tuple(sorted(lam + (k,), reverse=True))
                key = (e + k - 1 - n, lam2)
                out[key] = out.get(key, 0) + c * co
    return {k: v for k, v in out.items() if v}


def fock_vertex_operator(state_lam, target_lam, max_out_wt: int) -> dict:
    """All modes of Y(alpha_{-lam} 1, x) on |target>, as j -> {partition: coeff}.

    Y(alpha_{-n1-1}...alpha_{-nr-1} 1, x) = :d^(n1)alpha(x) ... d^(nr)alpha(x):,
    expanded as a sum over which factors contribute their annihilation half
    (applied first) and which their creation half. Output weights above
    ``max_out_wt`` are dropped.
    """
    if not state_lam:
        return {-1: {target_lam: Fraction(1)}}
    ns = [p - 1 for p in state_lam]
    r = len(ns)
    total = {}
    for mask in range(1 << r):
        st = {(0, target_lam): Fraction(1)}
        for i in range(r):
            if mask >> i & 1:
                st = _field_part(st, ns[i], True, max_out_wt)
                if not st:
                    break
        if not st:
            continue
        for i in range(r):
            if not mask >> i & 1:
                st = _field_part(st, ns[i], False, max_out_wt)
                if not st:
                    break
        for (e, lam), c in st.items():
            key = (e, lam)
            total[key] = total.get(key, 0) + c
    out = {}
    for (e, lam), c in total.items():
        if c:
            out.setdefault(-e - 1, {})[lam] = Fraction(c)
    return out


def fock_mode(state_lam, j: int, target_lam, max_out_wt=None) -> dict:
    """Coefficient dict (partition -> Fraction) of s_j |target> for s = alpha_{-lam} 1."""
    if max_out_wt is None:
        max_out_wt = sum(state_lam) + sum(target_lam) - j - 1
    return fock_vertex_operator(state_lam, target_lam, max_out_wt).get(j, {})


def build_heisenberg(max_wt: int) -> VertexModel:
    """Rank-one Heisenberg vertex algebra truncated at weight max_wt, deg = 2*wt."""
    if max_wt < 0:
        raise ValueError("max_wt must be >= 0")
    parts = []
    for n in range(max_wt + 1):
        parts.extend(sorted(partitions(n), reverse=True))
    basis = [BasisIndex(fock_id(l), Bidegree(2 * sum(l), 2 * sum(l))) for l in parts]
    space = GradedSpace(basis, wt2_max=2 * max_wt, name=f"heisenberg{max_wt}")
    pos = {l: i for i, l in enumerate(parts)}
    n_lo, n_hi = -max_wt - 1, max(2 * max_wt - 1, -1)
    modes = {}
    for a, la in enumerate(parts):
        for b, lb in enumerate(parts):
            for j, row in fock_vertex_operator(la, lb, max_wt).items():
                if n_lo <= j <= n_hi and row:
                    modes[(a, j, b)] = {pos[l]: c for l, c in row.items()}
    omega = {pos[(1, 1)]: Fraction(1, 2)} if max_wt >= 2 else None
    return VertexModel(f"heisenberg{max_wt}", space, modes, {}, "vac", (n_lo, n_hi),
                       omega, Fraction(1) if omega else Fraction(0))


# ---------------------------------------------------------------- Borcherds e^{xD}

def build_comm_dg_algebra_va(name, space: GradedSpace, product: dict, d: dict, unit: str,
                             D: dict = None, conformal=None, central_charge=0) -> VertexModel:
    """Vertex algebra Y(a, x)b = (e^{xD} a) b of a graded commutative dg algebra.

    ``product[(i, j)]`` and ``d[i]``, ``D[i]`` are coefficient dicts over
    positions of ``space``. D must be a derivation of degree 2 (and weight +1)
    commuting with d and nilpotent on the space; these are checked.
    """
    D = {k: v for k, v in (D or {}).items() if v}
    n = space.dim
    B = space.basis

    def mul(x, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                e = product.get((i, j))
                if e:
                    K.axpy(out, e, a * b)
        return out

    def lin(tab, x):
        out = {}
        for i, a in x.items():
            e = tab.get(i)
            if e:
                K.axpy(out, e, a)
        return out

    for i, r in D.items():
        for k in r:
            if B[k].bidegree != B[i].bidegree + Bidegree(2, 2):
                raise ValueError(f"D-not-homogeneous: D({B[i].id}) must have bidegree shift (2,1)")
    for i in range(n):
        for j in range(n):
            x, y = {i: Fraction(1)}, {j: Fraction(1)}
            lhs = lin(D, mul(x, y))
            rhs = mul(lin(D, x), y)
            K.axpy(rhs, mul(x, lin(D, y)), 1)
            if lhs != rhs:
                raise ValueError(f"D-not-derivation at ({B[i].id}, {B[j].id})")
        x = {i: Fraction(1)}
        if lin(D, lin(d, x)) != lin(d, lin(D, x)):
            raise ValueError(f"D-d-noncommuting at {B[i].id}")
    # powers of D; nilpotency on the finite space
    powers = {i: [{i: Fraction(1)}] for i in range(n)}
    kmax = 0
    for i in range(n):
        cur = {i: Fraction(1)}
        for k in range(1, n + 2):
            cur = lin(D, cur)
            if not cur:
                break
            if k > n:
                raise ValueError("D is not nilpotent on the window")
            powers[i].append({q: c / _fact(k) for q, c in cur.items()})
        kmax = max(kmax, len(powers[i]) - 1)
    modes = {}
    for i in range(n):
        for k, Dk in enumerate(powers[i]):
            for j in range(n):
                r = mul(Dk, {j: Fraction(1)})
                if r:
                    modes[(i, -1 - k, j)] = r
    return VertexModel(name, space, modes, d, unit, (-1 - kmax, -1), conformal, central_charge)


def _fact(k):
    f = 1
    for i in range(2, k + 1):
        f *= i
    return f


def dual_numbers() -> VertexModel:
    """Q[x]/(x^2) in degree 0, weight 0."""
    sp = GradedSpace([BasisIndex("one", Bidegree(0, 0)), BasisIndex("x", Bidegree(0, 0))],
                     wt2_max=0, exact=True, name="dual")
    one, x = 0, 1
    prod = {(one, one): {one: Fraction(1)}, (one, x): {x: Fraction(1)}, (x, one): {x: Fraction(1)}}
    return build_comm_dg_algebra_va("dual", sp, prod, {}, "one")


def nilpotent_dg() -> VertexModel:
    """Q[s, t]/(s^2, t^2) with |s| = 1, |t| = 2, d(s) = t; all weights 0; omega = 0."""
    sp = GradedSpace([BasisIndex("one", Bidegree(0, 0)), BasisIndex("s", Bidegree(1, 0)),
                      BasisIndex("t", Bidegree(2, 0)), BasisIndex("st", Bidegree(3, 0))],
                     wt2_max=0, exact=True, name="nilpotent-dg")
    one, s, t, st = 0, 1, 2, 3
    f1 = Fraction(1)
    prod = {}
    for i in range(4):
        prod[(one, i)] = {i: f1}
        prod[(i, one)] = {i: f1}
    prod[(s, t)] = {st: f1}
    prod[(t, s)] = {st: f1}
    d = {s: {t: f1}}
    return build_comm_dg_algebra_va("nilpotent-dg", sp, prod, d, "one", conformal={},
                                    central_charge=0)


def truncated_polynomial_va(k: int) -> VertexModel:
    """Q[t]/(t^k) with |t| = 2, wt(t) = 1 and D(t^n) = n t^{n+1}."""
    basis = [BasisIndex("one" if n == 0 else f"t{n}", Bidegree(2 * n, 2 * n)) for n in range(k)]
    sp = GradedSpace(basis, wt2_max=2 * (k - 1), exact=True, name=f"poly{k}")
    prod = {}
    for a in range(k):
        for b in range(k):
            if a + b < k:
                prod[(a, b)] = {a + b: Fraction(1)}
    D = {n: {n + 1: Fraction(n)} for n in range(1, k - 1)}
    return build_comm_dg_algebra_va(f"poly{k}", sp, prod, {}, "one", D)


def import_classical_voa(name, basis_weights: dict, modes: dict, vacuum: str, n_range,
                         conformal=None, central_charge=0, wt_max=None) -> VertexModel:
    """Ordinary VOA table (ids, rational weights, (u, n, v) -> {id: coeff}) with deg = 2*wt."""
    items = []
    for bid, wt in basis_weights.items():
        wt2 = Fraction(wt) * 2
        if wt2.denominator != 1:
            raise ValueError(f"weight of {bid} must be in (1/2)Z")
        items.append(BasisIndex(bid, Bidegree(int(wt2), int(wt2))))
    items.sort(key=lambda b: (b.wt2, b.deg, b.id))
    wt2_max = max(b.wt2 for b in items) if wt_max is None else int(Fraction(wt_max) * 2)
    sp = GradedSpace(items, wt2_max=wt2_max, name=name)
    tab = {}
    for (u, n, v), row in modes.items():
        want = sp.index(u).bidegree + sp.index(v).bidegree + Bidegree(-2 * n - 2, -2 * n - 2)
        r = {}
        for bid, c in row.items():
            if sp.index(bid).bidegree != want:
                raise ValueError(f"bidegree-law violation in {u}[{n}] {v}: {bid}")
            r[sp.pos(bid)] = Fraction(c)
        if r:
            tab[(sp.pos(u), n, sp.pos(v))] = r
    conf = None if conformal is None else {sp.pos(b): Fraction(c) for b, c in conformal.items()}
    return VertexModel(name, sp, tab, {}, vacuum, n_range, conf, central_charge)


def jordan_block_example():
    """Synthetic pair (algebra, module) whose L(0) is a 2x2 Jordan block at 0.

    The algebra is Q[w]/(w^2) with w declared conformal of bidegree (4, 2);
    the module has basis m0, m1 in weight 0 with w_1 m0 = m1. Only meant for
    classification: L(0) on the algebra itself is not the weight operator.
    """
    from dgva.vertex import ModuleModel

    f1 = Fraction(1)
    sp = GradedSpace([BasisIndex("one", Bidegree(0, 0)), BasisIndex("w", Bidegree(4, 4))],
                     wt2_max=4, exact=True, name="jordan-algebra")
    modes = {(0, -1, 0): {0: f1}, (0, -1, 1): {1: f1}, (1, -1, 0): {1: f1}}
    alg = VertexModel("jordan-algebra", sp, modes, {}, "one", (-2, 1), {1: f1}, 0)
    msp = GradedSpace([BasisIndex("m0", Bidegree(0, 0)), BasisIndex("m1", Bidegree(0, 0))],
                      wt2_max=0, exact=True, name="jordan-module")
    act = {(0, -1, 0): {0: f1}, (0, -1, 1): {1: f1}, (1, 1, 0): {1: f1}}
    return alg, ModuleModel("jordan-module", alg, msp, act, {}, (-2, 1), {0: 0, 1: 0})
