"""Random single-entry mutations of a mode table, for testing the checkers.

A mutation adds ``c * e_k`` to one in-window entry ``u_n v``, with ``e_k`` of
the bidegree the law requires, so the mutant still parses. Some mutants are
still valid (``x_{-1} x = c x`` on dual numbers is again a commutative
algebra); ``commutative_oracle`` recognises those for models whose only
nonzero modes are ``n = -1``, independently of the vertex checkers.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct

from dgva.linalg import OutOfWindow
from dgva.vertex import ModuleModel, VertexModel

COEFFS = [Fraction(x) for x in (1, -1, 2, -2, 3)] + [Fraction(1, 2), Fraction(-1, 3)]


def candidate_entries(model: VertexModel):
    """(u, n, v, targets) for every in-window entry whose output component is nonempty."""
    sp, t = model.space, model.modes
    out = []
    for i, n, j in iproduct(range(sp.dim), range(t.n_lo, t.n_hi + 1), range(sp.dim)):
        try:
            t.lookup(i, n, j)
        except OutOfWindow:
            continue
        comp = sp.component(t.out_bidegree(i, n, j))
        if comp:
            out.append((i, n, j, comp))
    return out


def mutate(model: VertexModel, rng: random.Random, name=None):
    """Return (mutant, description)."""
    cands = candidate_entries(model)
    if not cands:
        raise ValueError("no mutable entries")
    i, n, j, comp = rng.choice(cands)
    k = rng.choice(comp)
    c = rng.choice(COEFFS)
    entries = {key: dict(r) for key, r in model.modes.entries.items()}
    row = entries.setdefault((i, n, j), {})
    row[k] = row.get(k, 0) + c
    if not row[k]:
        del row[k]
    if not row:
        del entries[(i, n, j)]
    B = model.space.basis
    desc = f"{B[i].id}[{n}] {B[j].id} += {c}*{B[k].id}"
    mutant = VertexModel(name or model.name, model.space, entries, model.d_rows, model.vacuum,
                         model.n_range, model.conformal, model.central_charge, model.tags)
    return mutant, desc


def _only_minus_one(model: VertexModel) -> bool:
    return all(n == -1 for (_, n, _), r in model.modes.entries.items() if r)


def commutative_oracle(model: VertexModel):
    """Brute-force verdict for models with only n = -1 modes and an exact window.

    Such a table is a vertex algebra exactly when the product u_{-1} v is a
    unital, associative, graded-commutative product for which d is a degree 1
    derivation (translation is then zero). Returns None when not applicable.
    """
    if not _only_minus_one(model) or not model.space.exact:
        return None
    n = model.space.dim
    deg = [b.deg for b in model.space.basis]
    tab = {(i, j): dict(r) for (i, _, j), r in model.modes.entries.items() if r}
    d = {i: dict(r) for i, r in model.d_rows.items()}

    def mul(x, y):
        out = {}
        for a, p in x.items():
            for b, q in y.items():
                for k, c in tab.get((a, b), {}).items():
                    out[k] = out.get(k, 0) + p * q * c
        return {k: c for k, c in out.items() if c}

    def dd(x):
        out = {}
        for a, p in x.items():
            for k, c in d.get(a, {}).items():
                out[k] = out.get(k, 0) + p * c
        return {k: c for k, c in out.items() if c}

    def add(x, y, s=1):
        out = dict(x)
        for k, c in y.items():
            out[k] = out.get(k, 0) + s * c
        return {k: c for k, c in out.items() if c}

    e = [{i: Fraction(1)} for i in range(n)]
    one = e[model.vac]
    if dd(one):
        return False
    for a in range(n):
        if mul(one, e[a]) != e[a] or mul(e[a], one) != e[a]:
            return False
        if dd(dd(e[a])):
            return False
        for b in range(n):
            ab = mul(e[a], e[b])
            s = -1 if deg[a] * deg[b] % 2 else 1
            if ab != {k: s * c for k, c in mul(e[b], e[a]).items()}:
                return False
            leib = add(mul(dd(e[a]), e[b]), mul(e[a], dd(e[b])), -1 if deg[a] % 2 else 1)
            if dd(ab) != leib:
                return False
            for c in range(n):
                if mul(ab, e[c]) != mul(e[a], mul(e[b], e[c])):
                    return False
    return True


def invalid_mutations(model: VertexModel, count: int, seed=0, max_tries=1000):
    """``count`` mutants that the oracle does not certify as still valid."""
    rng = random.Random(seed)
    out = []
    for _ in range(max_tries):
        m, desc = mutate(model, rng)
        if commutative_oracle(m) is True:
            continue
        out.append((m, desc))
        if len(out) == count:
            return out
    raise RuntimeError("could not find enough invalid mutations")


def mutate_module(module: ModuleModel, rng: random.Random):
    """Single-entry mutation of a module action table."""
    sp, t = module.space, module.action
    A = module.algebra.space
    cands = []
    for i, n, j in iproduct(range(A.dim), range(t.n_lo, t.n_hi + 1), range(sp.dim)):
        if not t.is_known(i, n, j):
            continue
        comp = sp.component(t.out_bidegree(i, n, j))
        if comp:
            cands.append((i, n, j, comp))
    i, n, j, comp = rng.choice(cands)
    k = rng.choice(comp)
    c = rng.choice(COEFFS)
    entries = {key: dict(r) for key, r in t.entries.items()}
    row = entries.setdefault((i, n, j), {})
    row[k] = row.get(k, 0) + c
    if not row[k]:
        del row[k]
    if not row:
        del entries[(i, n, j)]
    mut = ModuleModel(module.name, module.algebra, sp, entries, module.d_rows, (t.n_lo, t.n_hi),
                      module.grading)
    return mut, f"{A.basis[i].id}[{n}] {sp.basis[j].id} += {c}*{sp.basis[k].id}"
