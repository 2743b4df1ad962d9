"""Independent reference computations used by the oracle tests.

Nothing here imports the package's linear algebra or builders. The Fock
modes come from the iterate formula

    (a_{-k} w)_n = sum_i (-1)^i C(-k, i) (a_{-k-i} w_{n+i} - (-1)^k w_{n-k-i} a_i)

applied recursively, with a_j acting on monomials directly.
"""
from fractions import Fraction
from functools import lru_cache


def binom(m, i):
    out = Fraction(1)
    for t in range(i):
        out = out * (m - t) / (t + 1)
    return out


def partition_numbers(n_max):
    p = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return p


def monomials(n):
    """Partitions of n as descending tuples."""
    def rec(n, largest):
        if n == 0:
            yield ()
            return
        for k in range(min(n, largest), 0, -1):
            for rest in rec(n - k, k):
                yield (k,) + rest
    return list(rec(n, n))


def name(lam):
    return "vac" if not lam else "".join(f"a{k}" for k in lam)


def _add(out, vec, c=1):
    for k, v in vec.items():
        out[k] = out.get(k, 0) + c * v
        if not out[k]:
            del out[k]
    return out


def alpha(j, vec):
    """a_j on a combination of monomials; [a_m, a_n] = m delta_{m+n,0}."""
    out = {}
    for lam, c in vec.items():
        if j < 0:
            new = tuple(sorted(lam + (-j,), reverse=True))
            _add(out, {new: c})
        elif j > 0:
            mult = lam.count(j)
            if mult:
                rest = list(lam)
                rest.remove(j)
                _add(out, {tuple(rest): c * j * mult})
    return out


@lru_cache(maxsize=None)
def mode(lam, n, mu):
    """(state lam)_n (state mu) as a frozen tuple of (partition, coefficient)."""
    return tuple(sorted(_mode(lam, n, mu).items()))


def _mode(lam, n, mu):
    if not lam:
        return {mu: Fraction(1)} if n == -1 else {}
    if sum(lam) + sum(mu) - n - 1 < 0:
        return {}
    k, w = lam[0], lam[1:]
    wt_w, wt_v = sum(w), sum(mu)
    out = {}
    # a_{-k-i} w_{n+i} v: zero once wt w + wt v - n - i - 1 < 0
    for i in range(0, max(wt_w + wt_v - n, 0) + 1):
        c = (-1) ** i * binom(-k, i)
        if c:
            inner = dict(mode(w, n + i, mu))
            _add(out, alpha(-k - i, inner), c)
    # w_{n-k-i} a_i v: a_i v = 0 once i > wt v
    for i in range(0, wt_v + 1):
        c = (-1) ** i * binom(-k, i) * (-1) ** k
        if not c:
            continue
        av = alpha(i, {mu: Fraction(1)})
        for nu, x in av.items():
            _add(out, dict(mode(w, n - k - i, nu)), -c * x)
    return out


def dense_rank(rows, ncols):
    """Rank over Q by plain Gaussian elimination on dense lists."""
    m = [list(r) for r in rows if any(r)]
    rank, col = 0, 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / p
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


class Heisenberg:
    """Fock-space reference for the rank one Heisenberg vertex algebra."""

    def __init__(self, max_wt):
        self.max_wt = max_wt
        self.states = [lam for n in range(max_wt + 1) for lam in monomials(n)]
        self.index = {lam: i for i, lam in enumerate(self.states)}

    def vec(self, combo):
        out = [Fraction(0)] * len(self.states)
        for lam, c in combo.items():
            if sum(lam) <= self.max_wt:
                out[self.index[lam]] += c
        return out

    def c2_rank_upto(self, N):
        rows = []
        for u in self.states:
            for v in self.states:
                if sum(u) + sum(v) + 1 <= N:
                    rows.append(self.vec(dict(mode(u, -2, v))))
        return rows

    def r_dims(self, N):
        """dim R(V)_n for n <= N, computed weight by weight."""
        rows = self.c2_rank_upto(N)
        out = {}
        for n in range(N + 1):
            cols = [self.index[l] for l in monomials(n)]
            sub = [[r[c] for c in cols] for r in rows]
            out[n] = len(cols) - dense_rank(sub, len(cols))
        return out

    def circle(self, u, v):
        out = {}
        for i in range(0, sum(u) + 1):
            _add(out, dict(mode(u, i - 2, v)), binom(sum(u), i))
        return out

    def zhu_w_dims(self, N, M):
        """dim W_n(V)/(O_M ∩ W_n(V)) for n <= N; O_M is spanned by u∘v with
        wt u + wt v + 1 <= M and (L(-1) + L(0)) b with wt b + 1 <= M."""
        rows = []
        for u in self.states:
            for v in self.states:
                if sum(u) + sum(v) + 1 <= M:
                    rows.append(self.vec(self.circle(u, v)))
        omega = {(1, 1): Fraction(1, 2)}
        for b in self.states:
            if sum(b) + 1 <= M:
                z = {}
                for lam, c in omega.items():
                    _add(z, dict(mode(lam, 0, b)), c)
                    _add(z, dict(mode(lam, 1, b)), c)
                rows.append(self.vec(z))
        total = dense_rank(rows, len(self.states))
        out = {}
        for n in range(N + 1):
            # dim of (O_M ∩ W_n) = dim O_M - rank of O_M projected away from W_n
            hi = [i for i, l in enumerate(self.states) if sum(l) > n]
            proj = dense_rank([[r[i] for i in hi] for r in rows], len(hi))
            inter = total - proj
            out[n] = sum(1 for l in self.states if sum(l) <= n) - inter
        return out
