"""Pure-Python sparse row kernels.

Rows are plain dicts mapping an integer column to a nonzero exact scalar
(Fraction or int). The compiled module ``dgva._kernels`` exports the same
functions with the same semantics; ``dgva.kernels`` picks one at import.
"""


def axpy(dst, src, c):
    """dst += c * src in place, dropping entries that cancel."""
    if not c:
        return dst
    for k, v in src.items():
        x = dst.get(k)
        if x is None:
            dst[k] = c * v
        else:
            x = x + c * v
            if x:
                dst[k] = x
            else:
                del dst[k]
    return dst


def scaled(src, c):
    if not c:
        return {}
    return {k: c * v for k, v in src.items()}


def lincomb(pairs):
    """Sum of c * row over (c, row) pairs as a fresh dict."""
    out = {}
    for c, row in pairs:
        axpy(out, row, c)
    return out


def reduce_row(row, pivrows):
    """Reduce ``row`` against reduced echelon rows keyed by pivot column.

    ``pivrows`` must be in reduced form (no row has an entry in another
    row's pivot column), so a single pass suffices. Returns a new dict.
    """
    out = dict(row)
    hits = [k for k in out if k in pivrows]
    for p in hits:
        c = out.get(p)
        if c:
            axpy(out, pivrows[p], -c)
    return out


def echelon_insert(ech, row, limit=None):
    """Insert ``row`` into the reduced echelon dict ``ech`` in place.

    Only columns below ``limit`` may become pivots (columns at or above it
    are bookkeeping tags). Returns the new pivot, or None when the row is
    dependent on ``ech``.
    """
    r = reduce_row(row, ech)
    if limit is None:
        if not r:
            return None
        p = min(r)
    else:
        cands = [k for k in r if k < limit]
        if not cands:
            return None
        p = min(cands)
    lead = r[p]
    if lead != 1:
        inv = 1 / lead
        r = {k: v * inv for k, v in r.items()}
    for q, other in ech.items():
        c = other.get(p)
        if c:
            axpy(other, r, -c)
    ech[p] = r
    return p


def rref(rows, limit=None):
    """Reduced row echelon form of ``rows`` as a dict pivot -> row."""
    ech = {}
    for row in rows:
        if row:
            echelon_insert(ech, row, limit)
    return ech
