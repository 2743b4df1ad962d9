"""VADF: a line-oriented text format for truncated dg vertex algebras and modules.

    model <name>
    basis <id> deg=<int> wt=<rat>
    vacuum <id>
    conformal <id or combo> c=<rat>     # optional
    window wt<=<rat> modes=<int>..<int> [exact]
    d <id> = <combo>
    mode <id>[<int>] <id> = <combo>
    end

Module files start with ``module <name> over <model-name>``, have no
vacuum/conformal lines, act by algebra ids on module ids and may carry
``grade <id> = <rat>`` lines.
"""
from __future__ import annotations

import re
from fractions import Fraction

from dgva.linalg import BasisIndex, Bidegree, GradedSpace, fmt_q
from dgva.vertex import ModuleModel, VertexModel, mode_shift

ID = r"[A-Za-z0-9_.]+"
NAME = r"[A-Za-z0-9_.-]+"
RAT = r"[+-]?\d+(?:/\d+)?"
_TERM = re.compile(rf"\s*([+-])?\s*(\d+(?:/\d+)?)\s*\*\s*({ID})\s*")


class VadfError(ValueError):
    def __init__(self, line, msg, col=None):
        self.line, self.col = line, col
        where = f"line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(f"{where}: {msg}")


class VadfSyntaxError(VadfError):
    pass


class VadfSemanticError(VadfError):
    pass


def parse_rat(s: str, line=0, half=False) -> Fraction:
    if not re.fullmatch(RAT, s):
        raise VadfSyntaxError(line, f"bad rational {s!r}")
    q = Fraction(s)
    if half and (2 * q).denominator != 1:
        raise VadfSemanticError(line, f"weight {s} is not in (1/2)Z")
    return q


def parse_combo(text: str, line=0) -> list:
    """'1/2*a - 3*b' -> [(Fraction(1, 2), 'a'), (Fraction(-3), 'b')]; '0' -> []."""
    t = text.strip()
    if t == "0":
        return []
    out, pos = [], 0
    while pos < len(t):
        m = _TERM.match(t, pos)
        if not m or m.end() == pos:
            raise VadfSyntaxError(line, f"bad combination near {t[pos:]!r}", pos + 1)
        if m.group(1) is None and out:
            raise VadfSyntaxError(line, "terms must be separated by + or -", pos + 1)
        c = Fraction(m.group(2))
        out.append((-c if m.group(1) == "-" else c, m.group(3)))
        pos = m.end()
    if not out:
        raise VadfSyntaxError(line, "empty combination")
    return out


def fmt_combo(row: dict, space: GradedSpace, order=None) -> str:
    keys = sorted(row, key=order) if order else sorted(row)
    parts = []
    for k in keys:
        c = row[k]
        if not c:
            continue
        s = f"{fmt_q(abs(c))}*{space.basis[k].id}"
        if parts:
            parts.append(("- " if c < 0 else "+ ") + s)
        else:
            parts.append(("-" if c < 0 else "") + s)
    return " ".join(parts) if parts else "0"


_LINE = {
    "model": re.compile(rf"model\s+({NAME})$"),
    "module": re.compile(rf"module\s+({NAME})\s+over\s+({NAME})$"),
    "basis": re.compile(rf"basis\s+({ID})\s+deg=([+-]?\d+)\s+wt=({RAT})$"),
    "vacuum": re.compile(rf"vacuum\s+({ID})$"),
    "conformal": re.compile(rf"conformal\s+(.+?)\s+c=({RAT})$"),
    "window": re.compile(rf"window\s+wt<=({RAT})\s+modes=([+-]?\d+)\.\.([+-]?\d+)(\s+exact)?$"),
    "d": re.compile(rf"d\s+({ID})\s*=\s*(.+)$"),
    "mode": re.compile(rf"mode\s+({ID})\[([+-]?\d+)\]\s+({ID})\s*=\s*(.+)$"),
    "grade": re.compile(rf"grade\s+({ID})\s*=\s*({RAT})$"),
    "end": re.compile(r"end$"),
}


def _records(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw = line.split(None, 1)[0]
        pat = _LINE.get(kw)
        if pat is None:
            raise VadfSyntaxError(no, f"unknown keyword {kw!r}", raw.find(kw) + 1)
        m = pat.match(line)
        if not m:
            raise VadfSyntaxError(no, f"malformed {kw} line", raw.find(kw) + 1)
        yield no, kw, m.groups()


class _Doc:
    def __init__(self):
        self.kind = None
        self.name = None
        self.over = None
        self.basis = []
        self.basis_line = {}
        self.vacuum = None
        self.conformal = None
        self.window = None
        self.d = []
        self.modes = []
        self.grades = []
        self.ended = False


def _read(text: str) -> _Doc:
    doc = _Doc()
    for no, kw, g in _records(text):
        if doc.ended:
            raise VadfSyntaxError(no, "content after end")
        if doc.kind is None and kw not in ("model", "module"):
            raise VadfSyntaxError(no, "file must start with a model or module line")
        if kw in ("model", "module"):
            if doc.kind is not None:
                raise VadfSyntaxError(no, "second header line")
            doc.kind = kw
            doc.name = g[0]
            doc.over = g[1] if kw == "module" else None
        elif kw == "basis":
            if g[0] in doc.basis_line:
                raise VadfSemanticError(no, f"duplicate basis id {g[0]!r}")
            wt = parse_rat(g[2], no, half=True)
            doc.basis.append((g[0], int(g[1]), int(2 * wt)))
            doc.basis_line[g[0]] = no
        elif kw == "vacuum":
            doc.vacuum = (no, g[0])
        elif kw == "conformal":
            doc.conformal = (no, g[0], parse_rat(g[1], no))
        elif kw == "window":
            doc.window = (no, parse_rat(g[0], no, half=True), int(g[1]), int(g[2]), bool(g[3]))
        elif kw == "d":
            doc.d.append((no, g[0], parse_combo(g[1], no)))
        elif kw == "mode":
            doc.modes.append((no, g[0], int(g[1]), g[2], parse_combo(g[3], no)))
        elif kw == "grade":
            doc.grades.append((no, g[0], parse_rat(g[1], no, half=True)))
        elif kw == "end":
            doc.ended = True
    if doc.kind is None:
        raise VadfSyntaxError(1, "empty document")
    if not doc.ended:
        raise VadfSyntaxError(len(text.splitlines()), "missing end line")
    if doc.window is None:
        raise VadfSyntaxError(len(text.splitlines()), "missing window line")
    return doc


def _space(doc: _Doc) -> GradedSpace:
    _, wt, _, _, exact = doc.window
    basis = [BasisIndex(i, Bidegree(deg, wt2)) for i, deg, wt2 in doc.basis]
    for b in basis:
        if b.wt2 > 2 * wt:
            raise VadfSemanticError(doc.basis_line[b.id], f"basis {b.id} above the window")
    return GradedSpace(basis, wt2_max=int(2 * wt), exact=exact, name=doc.name)


def _row(space, combo, no, want=None, what=""):
    row = {}
    for c, bid in combo:
        if bid not in space:
            raise VadfSemanticError(no, f"undeclared id {bid!r}")
        k = space.pos(bid)
        if want is not None and space.basis[k].bidegree != want:
            raise VadfSemanticError(
                no, f"bidegree violation in {what}: {bid} has {space.basis[k].bidegree}, expected {want}")
        row[k] = row.get(k, Fraction(0)) + c
    return {k: c for k, c in row.items() if c}


def _differential(doc, space):
    d = {}
    for no, bid, combo in doc.d:
        if bid not in space:
            raise VadfSemanticError(no, f"undeclared id {bid!r}")
        k = space.pos(bid)
        if k in d:
            raise VadfSemanticError(no, f"duplicate d line for {bid}")
        d[k] = _row(space, combo, no, space.basis[k].bidegree + Bidegree(1, 0), f"d {bid}")
    return d


def _modes(doc, left, right):
    _, _, lo, hi, _ = doc.window
    if lo > hi:
        raise VadfSemanticError(doc.window[0], "empty mode range")
    seen = {}
    out = {}
    for no, u, n, v, combo in doc.modes:
        for bid, sp in ((u, left), (v, right)):
            if bid not in sp:
                raise VadfSemanticError(no, f"undeclared id {bid!r}")
        if not lo <= n <= hi:
            raise VadfSemanticError(no, f"mode {n} outside modes={lo}..{hi}")
        key = (left.pos(u), n, right.pos(v))
        if key in seen:
            raise VadfSemanticError(no, f"duplicate mode line (first at line {seen[key]})")
        seen[key] = no
        want = left.basis[key[0]].bidegree + right.basis[key[2]].bidegree + mode_shift(n)
        row = _row(right, combo, no, want, f"mode {u}[{n}] {v}")
        if row:
            out[key] = row
    return out


def parse_model(text: str) -> VertexModel:
    doc = _read(text)
    if doc.kind != "model":
        raise VadfSyntaxError(1, "expected a model file")
    sp = _space(doc)
    if doc.vacuum is None:
        raise VadfSemanticError(1, "missing vacuum line")
    no, vac = doc.vacuum
    if vac not in sp:
        raise VadfSemanticError(no, f"undeclared id {vac!r}")
    if sp.index(vac).bidegree != Bidegree(0, 0):
        raise VadfSemanticError(no, "vacuum must have bidegree (0, 0)")
    d = _differential(doc, sp)
    if d.get(sp.pos(vac)):
        raise VadfSemanticError([x[0] for x in doc.d if x[1] == vac][0], "d(vacuum) must be 0")
    modes = _modes(doc, sp, sp)
    conf, cc = None, Fraction(0)
    if doc.conformal is not None:
        cno, expr, cc = doc.conformal
        combo = [(Fraction(1), expr)] if re.fullmatch(ID, expr) and expr != "0" else parse_combo(expr, cno)
        conf = _row(sp, combo, cno)
    return VertexModel(doc.name, sp, modes, d, vac, doc.window[2:4], conf, cc)


def parse_module(text: str, model: VertexModel) -> ModuleModel:
    doc = _read(text)
    if doc.kind != "module":
        raise VadfSyntaxError(1, "expected a module file")
    if doc.over != model.name:
        raise VadfSemanticError(1, f"module is over {doc.over!r}, model is {model.name!r}")
    if doc.vacuum is not None or doc.conformal is not None:
        raise VadfSemanticError((doc.vacuum or doc.conformal)[0], "module files carry no vacuum/conformal")
    sp = _space(doc)
    d = _differential(doc, sp)
    act = _modes(doc, model.space, sp)
    grading = None
    if doc.grades:
        grading = {}
        for no, bid, g in doc.grades:
            if bid not in sp:
                raise VadfSemanticError(no, f"undeclared id {bid!r}")
            grading[sp.pos(bid)] = int(2 * g)
        missing = [b.id for k, b in enumerate(sp.basis) if k not in grading]
        if missing:
            raise VadfSemanticError(doc.grades[-1][0], f"grade missing for {missing[0]!r}")
    return ModuleModel(doc.name, model, sp, act, d, doc.window[2:4], grading)


# ---------------------------------------------------------------- serializer

def _canon(space: GradedSpace):
    order = sorted(range(space.dim), key=lambda k: (space.basis[k].wt2, space.basis[k].deg, space.basis[k].id))
    rank = {k: r for r, k in enumerate(order)}
    return order, rank


def _basis_lines(space):
    order, rank = _canon(space)
    lines = []
    for k in order:
        b = space.basis[k]
        lines.append(f"basis {b.id} deg={b.deg} wt={fmt_q(Fraction(b.wt2, 2))}")
    return lines, rank


def _window_line(space, n_range):
    wt = Fraction(space.wt2_max if space.wt2_max is not None else max(b.wt2 for b in space.basis), 2)
    return f"window wt<={fmt_q(wt)} modes={n_range[0]}..{n_range[1]}" + (" exact" if space.exact else "")


def _body(lines, left, lrank, right, rrank, table, d_rows):
    for k in sorted(d_rows, key=lambda k: rrank[k]):
        if d_rows[k]:
            lines.append(f"d {right.basis[k].id} = {fmt_combo(d_rows[k], right, rrank.get)}")
    for (i, n, j) in sorted(table.entries, key=lambda t: (lrank[t[0]], t[1], rrank[t[2]])):
        row = table.entries[(i, n, j)]
        if row:
            lines.append(f"mode {left.basis[i].id}[{n}] {right.basis[j].id} = {fmt_combo(row, right, rrank.get)}")


def serialize_model(model: VertexModel) -> str:
    sp = model.space
    lines = [f"model {model.name}"]
    bl, rank = _basis_lines(sp)
    lines += bl
    lines.append(f"vacuum {model.vacuum}")
    if model.conformal is not None:
        lines.append(f"conformal {fmt_combo(model.conformal, sp, rank.get)} c={fmt_q(model.central_charge)}")
    lines.append(_window_line(sp, model.n_range))
    _body(lines, sp, rank, sp, rank, model.modes, model.d_rows)
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_module(module: ModuleModel) -> str:
    sp = module.space
    lines = [f"module {module.name} over {module.algebra.name}"]
    bl, rank = _basis_lines(sp)
    lines += bl
    lines.append(_window_line(sp, (module.action.n_lo, module.action.n_hi)))
    if module.grading is not None:
        for k in sorted(module.grading, key=rank.get):
            lines.append(f"grade {sp.basis[k].id} = {fmt_q(Fraction(module.grading[k], 2))}")
    _, arank = _canon(module.algebra.space)
    _body(lines, module.algebra.space, arank, sp, rank, module.action, module.d_rows)
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_model(path) -> VertexModel:
    with open(path, encoding="utf-8") as f:
        return parse_model(f.read())


def load_module(path, model) -> ModuleModel:
    with open(path, encoding="utf-8") as f:
        return parse_module(f.read(), model)


def tables_equal(a: VertexModel, b: VertexModel) -> bool:
    """Same basis, vacuum, conformal data, window and mode/d tables, compared by ids."""
    A, B = a.space, b.space
    if {x.id: x.bidegree for x in A.basis} != {x.id: x.bidegree for x in B.basis}:
        return False
    if (A.wt2_max, A.exact, a.n_range, a.vacuum) != (B.wt2_max, B.exact, b.n_range, b.vacuum):
        return False

    def by_id(sp, row):
        return {sp.basis[k].id: c for k, c in row.items() if c}

    ta = {(A.basis[i].id, n, A.basis[j].id): by_id(A, r) for (i, n, j), r in a.modes.entries.items() if r}
    tb = {(B.basis[i].id, n, B.basis[j].id): by_id(B, r) for (i, n, j), r in b.modes.entries.items() if r}
    da = {A.basis[k].id: by_id(A, r) for k, r in a.d_rows.items()}
    db = {B.basis[k].id: by_id(B, r) for k, r in b.d_rows.items()}
    ca = None if a.conformal is None else by_id(A, a.conformal)
    cb = None if b.conformal is None else by_id(B, b.conformal)
    return ta == tb and da == db and ca == cb and a.central_charge == b.central_charge
