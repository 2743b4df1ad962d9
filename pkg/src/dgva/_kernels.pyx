# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse row kernels; same contract as dgva._kernels_py."""


cpdef dict axpy(dict dst, dict src, object c):
    cdef object k, v, x
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


cpdef dict scaled(dict src, object c):
    cdef object k, v
    if not c:
        return {}
    return {k: c * v for k, v in src.items()}


cpdef dict lincomb(object pairs):
    cdef dict out = {}
    cdef object c, row
    for c, row in pairs:
        axpy(out, <dict>row, c)
    return out


cpdef dict reduce_row(dict row, dict pivrows):
    cdef dict out = dict(row)
    cdef list hits = [k for k in out if k in pivrows]
    cdef object p, c
    for p in hits:
        c = out.get(p)
        if c:
            axpy(out, <dict>pivrows[p], -c)
    return out


cpdef object echelon_insert(dict ech, dict row, object limit=None):
    cdef dict r = reduce_row(row, ech)
    cdef object p, lead, inv, q, c, k, v
    cdef dict other
    cdef list cands
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


cpdef dict rref(object rows, object limit=None):
    cdef dict ech = {}
    cdef object row
    for row in rows:
        if row:
            echelon_insert(ech, <dict>row, limit)
    return ech
