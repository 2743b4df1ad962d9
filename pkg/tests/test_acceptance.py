"""Acceptance criteria 1-8, each printed as one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""
import io
import time
from fractions import Fraction

import pytest

from dgva import builders, vadf
from dgva.cli import run_cli
from dgva.linalg import Bidegree
from dgva.modules import a_module, check_bimodule_relations, check_residue_lemmas, nat_transform
from dgva.mutate import invalid_mutations
from dgva.vertex import adjoint_module, check_vertex_axioms, cohomology_vertex_report
from dgva.zhu import (c2_subspace, check_c2_congruences, check_uv_vu, eta, gr_zhu, o_span,
                      parity_split, r_algebra, r_poisson_report, zhu_double_gr, zhu_quotient,
                      zhu_sweep)

import oracles

RESULTS = {}


def verdict(n, ok, detail, capsys=None):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def corpus():
    return {"dual": builders.dual_numbers(), "nilpotent-dg": builders.nilpotent_dg(),
            "heisenberg6": builders.build_heisenberg(6)}


def cli(argv):
    out, err = io.StringIO(), io.StringIO()
    return run_cli(argv, out, err), out.getvalue(), err.getvalue()


# ---------------------------------------------------------------- criteria

def criterion_1(tmp):
    notes, ok = [], True
    t0 = time.perf_counter()
    models = corpus()
    paths = {}
    for name, m in models.items():
        p = tmp / f"{name}.vadf"
        p.write_text(vadf.serialize_model(m))
        paths[name] = p
        code, _, _ = cli(["check", str(p), "--jacobi=-4..4"])
        ok &= code == 0
        notes.append(f"{name}:exit{code}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    notes.append(f"axioms {elapsed:.1f}s")
    for name, m in models.items():
        caught = 0
        for k, (mut, desc) in enumerate(invalid_mutations(m, 10, seed=2024)):
            p = tmp / f"{name}-mut{k}.vadf"
            p.write_text(vadf.serialize_model(mut))
            code, _, err = cli(["check", str(p)])
            if code == 1 and "witness (" in err:
                caught += 1
        ok &= caught == 10
        notes.append(f"{name}:mutants {caught}/10")
    return ok, ", ".join(notes)


def criterion_2():
    h6 = builders.build_heisenberg(6)
    h7 = builders.build_heisenberg(7)
    ref = oracles.Heisenberg(7)
    dims = [sum(1 for b in h6.space.basis if b.wt2 == 2 * n) for n in range(7)]
    ok_v = dims == [1, 1, 2, 3, 5, 7, 11] == oracles.partition_numbers(6)
    r = r_algebra(h6, 6)
    rd = [r.dims_by_weight().get(Fraction(n), 0) for n in range(7)]
    ok_r = rd == [1] * 7 == [ref.r_dims(6)[n] for n in range(7)]
    ok_br = all(not v for v in r.bracket.entries.values())
    zp = zhu_quotient(h7, 4, 6)
    wd = [zp.w_dims()[Fraction(n)] for n in range(5)]
    ok_z = wd == [n + 1 for n in range(5)] == [ref.zhu_w_dims(4, 6)[n] for n in range(5)]
    ok_s = zp.stabilized is True
    e = eta(r_algebra(h7, 4), zp, "W")
    ok_e = e.passed and e.layers.passed and e.bijective
    ok = ok_v and ok_r and ok_br and ok_z and ok_s and ok_e
    return ok, (f"dimV={dims} dimR={rd} W_nA={wd} stabilized={zp.stabilized} "
                f"etaW-per-weight={e.layers.passed} bracket0={ok_br}")


def criterion_3():
    t0 = time.perf_counter()
    m = builders.nilpotent_dg()
    c2, O = c2_subspace(m, 0), o_span(m, 0)
    r = r_algebra(m, 0)
    zp = zhu_quotient(m, 0, 0)
    etas = [eta(r, zp, v) for v in ("F", "W", "FW")]
    iso = all(x.passed and x.bijective for x in etas)
    # the quotient product is the original u_{-1} v
    same = all(zp.star.entry(a, b) == m.modes.entries.get((a, -1, b), {})
               for a in range(4) for b in range(4))
    hv = cohomology_vertex_report(m)
    H = hv.model
    classes = sorted(str(x) for x in hv.reps)
    h_ok = H.space.dim == 2 and classes == ["1*one", "1*st"]
    ax = check_vertex_axioms(H)
    elapsed = time.perf_counter() - t0
    ok = (c2.dim == 0 and O.dim == 0 and zp.space.dim == r.space.dim == 4 and iso and same
          and h_ok and ax.passed and hv.report.passed and elapsed < 5)
    return ok, (f"C2={c2.dim} O={O.dim} dimA={zp.space.dim} dimR={r.space.dim} eta-iso={iso} "
                f"H={classes} H-axioms={ax.status} {elapsed:.2f}s")


def criterion_4():
    notes, ok = [], True
    for name, m in corpus().items():
        N = Fraction(m.space.wt2_max, 2)
        r = r_algebra(m, N, congruences=False)
        cong = check_c2_congruences(m, c2_subspace(m, N), r.wt2_max)
        pr = r_poisson_report(r, Bidegree(0, 0))
        NZ = min(N, 4)
        zp = zhu_quotient(m, NZ, N, checks=False)
        gF, gFW = gr_zhu(zp, "F"), gr_zhu(zp, "FW")
        shifts = (gF.bracket.shift == Bidegree(-2, 0) and gFW.bracket.shift == Bidegree(-2, -2))
        parts = len(cong.parts)
        good = pr.passed and cong.passed and parts == 9 and gF.report.passed \
            and gFW.report.passed and shifts
        ok &= good
        notes.append(f"{name}:R={pr.status} congruences={cong.status}({parts}) "
                     f"grF={gF.report.status} grFW={gFW.report.status}")
    return ok, "; ".join(notes)


def criterion_5():
    notes, ok = [], True
    for m, N in ((builders.build_heisenberg(4), 4), (builders.nilpotent_dg(), 0)):
        zp = zhu_quotient(m, N, N, checks=False)
        rep = zhu_double_gr(zp)
        ok &= rep.passed
        notes.append(f"{m.name}:{rep.status}")
    return ok, ", ".join(notes)


def criterion_6():
    notes, ok = [], True
    for m, N, M in ((builders.build_heisenberg(6), 3, 5), (builders.nilpotent_dg(), 0, 3)):
        bm = a_module(m, adjoint_module(m), N, M, checks=False)
        rel = check_bimodule_relations(bm)
        lem = check_residue_lemmas(bm, kmax=3)
        n_rel = sum(1 for p in rel.parts if p.name not in ("unit", "presentation-triples"))
        chk = sum(r.checked for _, r in rel.walk())
        n_lem = sum(r.checked for _, r in lem.walk())
        good = rel.passed and lem.passed and n_rel == 7 and n_lem > 0
        ok &= good
        notes.append(f"{m.name}:relations={rel.status}({n_rel} families, {chk} checks) "
                     f"residue={lem.status}({n_lem})")
    return ok, "; ".join(notes)


def criterion_7():
    notes, ok = [], True
    cache = {}
    for name, m in corpus().items():
        N = 3 if name.startswith("heis") else 0
        M = Fraction(m.space.wt2_max, 2)
        res = []
        for v in ("psi", "phi", "Psi"):
            nt = nat_transform(m, adjoint_module(m), v, N, M, cache=cache)
            good = nt.passed and nt.bijective
            ok &= good
            res.append(f"{v}={'bij' if good else 'NOT'}")
            if nt.layers is not None:
                # per-layer blocks: gr_* psi (weight layers), gr^[*] phi (degree layers)
                ok &= nt.layers.passed
                res.append(f"gr-{v}={'bij' if nt.layers.passed else 'NOT'}")
        notes.append(f"{name}:" + ",".join(res))
    return ok, "; ".join(notes)


def criterion_8():
    notes, ok = [], True
    h7 = builders.build_heisenberg(7)
    for m, N, M in ((h7, 4, 6), (builders.nilpotent_dg(), 0, 0), (builders.dual_numbers(), 0, 0)):
        zp = zhu_quotient(m, N, M)
        cen = [p for _, p in zp.report.walk() if p.name == "omega-central"]
        uv = check_uv_vu(m, zp).finish()
        par = parity_split(o_span(m, M)).finish()
        good = all(p.passed for p in cen) and uv.passed and par.passed and zp.report.passed
        ok &= good
        notes.append(f"{m.name}:omega-central={'/'.join(p.status for p in cen) or 'n/a'} "
                     f"uv-vu={uv.status} parity={par.status}")
    sw = list(zhu_sweep(h7, 4, [4, 5, 6, 7]).values())
    anti = all(b <= a for a, b in zip(sw, sw[1:]))
    ok &= anti
    notes.append(f"sweep M=4..7 dims={sw}")
    return ok, "; ".join(notes)


# ---------------------------------------------------------------- pytest entry points

def test_criterion_1_axioms_and_mutations(tmp_path, capsys):
    ok, detail = criterion_1(tmp_path)
    assert verdict(1, ok, detail, capsys), detail


@pytest.mark.parametrize("n,fn", [(2, criterion_2), (3, criterion_3), (4, criterion_4),
                                  (5, criterion_5), (6, criterion_6), (7, criterion_7),
                                  (8, criterion_8)])
def test_criterion(n, fn, capsys):
    ok, detail = fn()
    assert verdict(n, ok, detail, capsys), detail


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path
    with tempfile.TemporaryDirectory() as d:
        results = [criterion_1(Path(d))] + [f() for f in (criterion_2, criterion_3, criterion_4,
                                                          criterion_5, criterion_6, criterion_7,
                                                          criterion_8)]
    for n, (ok, detail) in enumerate(results, 1):
        verdict(n, ok, detail)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
