"""Command line interface: ``dgva <subcommand> FILE ...``.

Exit status: 0 all checks pass, 1 a mathematical check failed, 2 usage or
parse error, 3 the declared window is too small for the request.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from dgva import builders, vadf
from dgva.dg import CheckReport
from dgva.linalg import OutOfWindow, fmt_q
from dgva.report import Report
from dgva.vertex import (adjoint_module, check_conformal, check_module_axioms, check_vertex_axioms,
                         cohomology_vertex_report)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_WINDOW = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _frac(s: str) -> Fraction:
    try:
        return vadf.parse_rat(s, half=True)
    except vadf.VadfError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _window(s: str):
    try:
        lo, hi = (int(x) for x in s.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError("expected L..H") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty window")
    return lo, hi


def _wt(wt2) -> str:
    return fmt_q(Fraction(wt2, 2))


def _dims_rows(space):
    return [[b.deg, _wt(b.wt2), len(space.component(b))] for b in space.bidegrees()]


def _default_wt(model, given):
    if given is not None:
        return given
    if model.space.wt2_max is None:
        raise UsageError("--max-wt is required for a model without a weight window")
    return Fraction(model.space.wt2_max, 2)


def _levels(max_wt, cutoff):
    if cutoff is None:
        cutoff = max_wt
    if cutoff < max_wt:
        raise UsageError("--cutoff must be >= --max-wt")
    return max_wt, cutoff


# ---------------------------------------------------------------- subcommands

def cmd_check(args, rep: Report):
    model = vadf.load_model(args.file)
    rep.table("model", ["name", "dim", "modes", "conformal", "central_charge"],
              [[model.name, model.space.dim, f"{model.n_range[0]}..{model.n_range[1]}",
                "none" if not model.has_conformal else ("zero" if not model.conformal else "yes"),
                fmt_q(model.central_charge)]])
    rep.table("dims", ["deg", "wt", "dim"], _dims_rows(model.space))
    axioms = check_vertex_axioms(model, args.jacobi, fail_fast=args.fail_fast)
    rep.add_check(axioms)
    if args.fail_fast and not axioms.passed:
        return
    if model.has_conformal and model.conformal:
        rep.add_check(check_conformal(model))
    if args.module:
        module = vadf.load_module(args.module, model)
        rep.add_check(check_module_axioms(model, module, args.jacobi))


def cmd_cohomology(args, rep: Report):
    model = vadf.load_model(args.file)
    hv = cohomology_vertex_report(model)
    H = hv.model
    rep.table("cohomology", ["deg", "wt", "dim"], _dims_rows(H.space))
    rep.table("representatives", ["class", "cocycle"],
              [[b.id, str(r)] for b, r in zip(H.space.basis, hv.reps)])
    rep.add_check(hv.report)
    rep.add_check(check_vertex_axioms(H, args.jacobi))


def cmd_c2(args, rep: Report):
    from dgva.zhu import r_algebra
    model = vadf.load_model(args.file)
    N = _default_wt(model, args.max_wt)
    r = r_algebra(model, N, congruences=False)
    sp = model.space
    rows = []
    for bd in sp.bidegrees():
        if bd.wt2 > r.wt2_max:
            continue
        dv, dr = len(sp.component(bd)), len(r.space.component(bd))
        rows.append([bd.deg, _wt(bd.wt2), dv, dv - dr, dr])
    rep.table("c2", ["deg", "wt", "dim_V", "dim_C2", "dim_R"], rows)


def cmd_r(args, rep: Report):
    from dgva.zhu import r_algebra, r_poisson_report
    model = vadf.load_model(args.file)
    r = r_algebra(model, _default_wt(model, args.max_wt))
    rep.table("r-dims", ["deg", "wt", "dim"], _dims_rows(r.space))
    rep.table("r-basis", ["id", "deg", "wt", "representative"],
              [[b.id, b.deg, _wt(b.wt2), str(x)] for b, x in zip(r.space.basis, r.reps)])
    nz = sum(1 for v in r.bracket.entries.values() if v)
    rep.table("bracket", ["nonzero_entries"], [[nz]])
    rep.add_check(r.report)
    rep.add_check(r_poisson_report(r))


def _zhu(args, model, checks=True):
    from dgva.zhu import zhu_quotient
    N, M = _levels(_default_wt(model, args.max_wt), args.cutoff)
    return zhu_quotient(model, N, M, checks=checks)


def cmd_zhu(args, rep: Report):
    from dgva.zhu import check_uv_vu, window_allows, zhu_sweep
    model = vadf.load_model(args.file)
    zp = _zhu(args, model)
    rows = [[fmt_q(n), d] for n, d in sorted(zp.w_dims().items())]
    rep.table("weight-filtration", ["n", "dim_W_n"], rows)
    stab = "unknown" if zp.stabilized is None else str(zp.stabilized).lower()
    rep.table("zhu", ["max_wt", "cutoff", "dim", "stabilized"],
              [[fmt_q(zp.max_wt), fmt_q(zp.cutoff), zp.space.dim, stab]])
    if args.sweep:
        cut = [zp.cutoff + k for k in range(4)]
        sw = zhu_sweep(model, zp.max_wt, [M for M in cut if window_allows(model, M)])
        for M in cut:
            if M not in sw:
                rep.notes.append(f"sweep cutoff {fmt_q(M)} skipped: beyond the weight window")
        rows = [[fmt_q(M), d] for M, d in sw.items()]
        rep.table("sweep", ["cutoff", "dim"], rows)
        mono = CheckReport("antitone-in-cutoff")
        vals = list(sw.values())
        for a, b in zip(vals, vals[1:]):
            mono.expect(("sweep",), b <= a, b, f"<= {a}")
        rep.add_check(mono.finish())
    rep.notes.extend(zp.report.notes)
    rep.add_check(zp.report)
    rep.add_check(check_uv_vu(model, zp).finish())


def cmd_gr(args, rep: Report):
    from dgva.zhu import gr_zhu
    model = vadf.load_model(args.file)
    g = gr_zhu(_zhu(args, model), args.variant)
    rep.table("layers", ["deg", "wt", "dim"], _dims_rows(g.space))
    rep.add_check(g.report)


def cmd_eta(args, rep: Report):
    from dgva.zhu import eta, r_algebra
    model = vadf.load_model(args.file)
    zp = _zhu(args, model)
    r = r_algebra(model, zp.max_wt)
    m = eta(r, zp, args.variant)
    rep.table("eta", ["variant", "source_dim", "target_dim", "rank", "surjective", "injective"],
              [[args.variant, r.space.dim, m.matrix.target.dim, m.rank,
                str(m.surjective).lower(), str(m.injective).lower()]])
    rep.table("layers", ["layer", "bijective"],
              [[str(w.inputs[0]), "false"] for w in m.layers.witnesses]
              + [["all", str(m.layers.passed).lower()]])
    rep.add_check(m.report)


def cmd_module(args, rep: Report):
    from dgva import modules as mm
    model = vadf.load_model(args.file)
    if args.module:
        module = vadf.load_module(args.module, model)
    else:
        module = adjoint_module(model)
    op = args.op
    if op == "classify":
        cl = mm.classify_module(model, module)
        rep.table("classification", ["flag", "value"],
                  [[k, str(v).lower()] for k, v in cl.flags.items()] + [["kind", cl.kind]])
        rep.add_check(cl.report)
        return
    N = _default_wt(model, args.max_wt)
    if op == "r":
        rm = mm.r_module(model, module, N)
        rep.table("r-module", ["deg", "wt", "dim"], _dims_rows(rm.space))
        rep.add_check(rm.report)
        return
    N, M = _levels(N, args.cutoff)
    if op == "a":
        bm = mm.a_module(model, module, N, M)
        rep.table("a-module", ["deg", "wt", "dim"], _dims_rows(bm.space))
        rep.add_check(bm.report)
        rep.add_check(mm.check_residue_lemmas(bm))
    elif op == "gr":
        bm = mm.a_module(model, module, N, M)
        g = mm.gr_a_module(bm, args.variant or "FW")
        rep.table("gr-module", ["deg", "wt", "dim"], _dims_rows(g.space))
        rep.add_check(g.report)
    elif op == "nat":
        variant = args.variant or "Psi"
        if variant not in mm.NAT_VARIANTS:
            raise UsageError(f"--variant for nat must be one of {', '.join(mm.NAT_VARIANTS)}")
        nt = mm.nat_transform(model, module, variant, N, M)
        mo = nt.morphism
        rep.table("nat", ["name", "source_dim", "target_dim", "rank", "bijective"],
                  [[nt.name, nt.source.dim, mo.matrix.target.dim, mo.rank,
                    str(nt.bijective).lower()]])
        rep.add_check(mo.report)
        if nt.layers is not None:
            rep.add_check(nt.layers)


def cmd_gen(args, out):
    if args.family == "heisenberg":
        if args.max_wt is None:
            raise UsageError("gen heisenberg needs --max-wt")
        if args.max_wt.denominator != 1 or args.max_wt < 0:
            raise UsageError("--max-wt must be a non-negative integer")
        model = builders.build_heisenberg(int(args.max_wt))
    elif args.family == "dual":
        model = builders.dual_numbers()
    else:
        model = builders.nilpotent_dg()
    text = vadf.serialize_model(model)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


COMMANDS = {"check": cmd_check, "cohomology": cmd_cohomology, "c2": cmd_c2, "r": cmd_r,
            "zhu": cmd_zhu, "gr": cmd_gr, "eta": cmd_eta, "module": cmd_module}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dgva", description="exact computations with truncated dg vertex algebras")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, wt=False, cut=False):
        sp.add_argument("file")
        sp.add_argument("--json-like", action="store_true", help="key=value lines instead of TSV")
        sp.add_argument("--timestamps", action="store_true")
        sp.add_argument("--jacobi", type=_window, default=(-4, 4), metavar="L..H",
                        help="mode window for Jacobi checks, e.g. --jacobi=-4..4 (the default)")
        if wt:
            sp.add_argument("--max-wt", type=_frac, default=None)
        if cut:
            sp.add_argument("--cutoff", type=_frac, default=None)
        return sp

    c = common(sub.add_parser("check", help="vertex (and module) axioms"))
    c.add_argument("--module", default=None)
    c.add_argument("--fail-fast", action="store_true", help="stop at the first failing family")
    common(sub.add_parser("cohomology", help="cohomology vertex algebra"))
    common(sub.add_parser("c2", help="C2 subspace by bidegree"), wt=True)
    common(sub.add_parser("r", help="C2-algebra R(V)"), wt=True)
    z = common(sub.add_parser("zhu", help="Zhu algebra A(V)"), wt=True, cut=True)
    z.add_argument("--sweep", action="store_true", help="dimensions for cutoffs M..M+3")
    for name, hlp in (("gr", "associated graded of A(V)"), ("eta", "comparison map R(V) -> gr A(V)")):
        g = common(sub.add_parser(name, help=hlp), wt=True, cut=True)
        g.add_argument("--variant", choices=("F", "W", "FW"), required=True)
    m = common(sub.add_parser("module", help="module functors"), wt=True, cut=True)
    m.add_argument("--module", default=None, help="module file (default: adjoint module)")
    m.add_argument("--op", choices=("classify", "r", "a", "gr", "nat"), required=True)
    m.add_argument("--variant", default=None, help="F|W|FW for gr, psi|phi|Psi for nat")
    gen = sub.add_parser("gen", help="write a corpus model in VADF")
    gen.add_argument("family", choices=("heisenberg", "dual", "nilpotent-dg"))
    gen.add_argument("--max-wt", type=_frac, default=None)
    gen.add_argument("-o", "--output", default=None)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        err.write(f"dgva: usage error: {e}\n")
        return EXIT_USAGE
    try:
        if args.command == "gen":
            cmd_gen(args, out)
            return EXIT_OK
        if args.command == "module" and args.op == "gr" and args.variant not in (None, "F", "W", "FW"):
            raise UsageError("--variant for gr must be F, W or FW")
        rep = Report(args.command)
        COMMANDS[args.command](args, rep)
    except UsageError as e:
        err.write(f"dgva: usage error: {e}\n")
        return EXIT_USAGE
    except vadf.VadfError as e:
        err.write(f"dgva: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        err.write(f"dgva: {e}\n")
        return EXIT_USAGE
    except OutOfWindow as e:
        err.write(f"dgva: window insufficient: {e}\n")
        return EXIT_WINDOW
    out.write(rep.render(json_like=args.json_like, timestamps=args.timestamps))
    if not rep.passed:
        for top in rep.checks:
            w = top.first_witness()
            if w is not None:
                err.write(f"dgva: {top.name} failed; witness {w}\n")
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
