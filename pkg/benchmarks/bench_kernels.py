"""Compiled vs pure-Python sparse kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Times ``rref`` on random sparse rational rows with each backend directly,
then one end-to-end computation per backend in a subprocess (the backend is
chosen at import, so ``DGVA_PURE_PYTHON=1`` needs a fresh interpreter).
"""
import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from dgva import _kernels_py

try:
    from dgva import _kernels as _compiled
except ImportError:
    _compiled = None

END_TO_END = ("import time; from dgva import builders; from dgva.zhu import zhu_quotient; "
              "from dgva.vertex import check_vertex_axioms; t=time.perf_counter(); "
              "m=builders.build_heisenberg(6); zhu_quotient(m, 4, 6); check_vertex_axioms(m); "
              "print(time.perf_counter()-t)")


def random_rows(n_rows, n_cols, density, seed):
    rng = random.Random(seed)
    rows = []
    for _ in range(n_rows):
        row = {}
        for c in range(n_cols):
            if rng.random() < density:
                row[c] = Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 4))
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print("case\tbackend\tseconds")
    for n, dens in ((60, 0.1), (120, 0.05), (200, 0.03)):
        rows = random_rows(n, n, dens, seed=n)
        for name, mod in (("python", _kernels_py), ("cython", _compiled)):
            if mod is None:
                print(f"rref{n}\t{name}\tunavailable")
                continue
            t = min(timeit.repeat(lambda: mod.rref([dict(r) for r in rows]),
                                  number=1, repeat=args.repeat))
            print(f"rref{n}\t{name}\t{t:.4f}")
    for name, env in (("python", {"DGVA_PURE_PYTHON": "1"}), ("default", {})):
        e = dict(os.environ)
        e.pop("DGVA_PURE_PYTHON", None)
        e.update(env)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=e, capture_output=True,
                             text=True, check=True).stdout.strip()
        print(f"heisenberg6-zhu+axioms\t{name}\t{float(out):.2f}")


if __name__ == "__main__":
    main()
