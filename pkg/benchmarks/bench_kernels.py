"""Compare the compiled term kernels with the pure-Python fallback.

Runs each kernel on the same inputs with both backends, checks the outputs
agree exactly, and reports the median time per call.

    python benchmarks/bench_kernels.py [--repeat 7] [--json]
"""

from __future__ import annotations

import argparse
import importlib
import json
import os
import random
import statistics
import subprocess
import sys
import time

from gmpy2 import mpq

from orbitfold.algebra import Chart, MultiPoly
from orbitfold.algebra import _pykernels


def _compiled():
    try:
        return importlib.import_module("orbitfold.algebra._kernels")
    except ImportError:
        return None


def random_poly(ch: Chart, nterms: int, maxdeg: int, rng: random.Random) -> MultiPoly:
    p = MultiPoly.zero(ch)
    for _ in range(nterms):
        e = tuple(rng.randint(0, maxdeg) for _ in ch.coords)
        c = mpq(rng.randint(-50, 50), rng.randint(1, 12))
        p = p + MultiPoly.monomial(ch, e).scale(c)
    return p


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def cases(seed=0):
    rng = random.Random(seed)
    ch = Chart("bench", ("a", "b", "c", "d"), (1, 1, 1, 1))
    small = [random_poly(ch, 20, 4, rng) for _ in range(2)]
    big = [random_poly(ch, 150, 6, rng) for _ in range(2)]
    row = [random_poly(ch, 30, 3, rng) for _ in range(8)]
    col = [random_poly(ch, 30, 3, rng) for _ in range(8)]
    return {
        "mul_small": ("mul_terms", (small[0].terms, small[1].terms)),
        "mul_large": ("mul_terms", (big[0].terms, big[1].terms)),
        "dot_8x30": ("dot_terms", ([p.terms for p in row], [p.terms for p in col])),
        "add_large": ("add_terms", (big[0].terms, big[1].terms, mpq(-3, 7))),
    }


def end_to_end(repeat: int) -> dict:
    """Wall time of a full ``verify --n 4`` under each backend, in subprocesses."""
    res = {}
    for label, pure in (("compiled", ""), ("python", "1")):
        env = dict(os.environ)
        env.pop("ORBITFOLD_PURE", None)
        if pure:
            env["ORBITFOLD_PURE"] = pure
        ts = []
        for _ in range(max(1, repeat // 3)):
            t0 = time.perf_counter()
            subprocess.run([sys.executable, "-m", "orbitfold.cli", "verify", "--n", "4"],
                           env=env, check=True, stdout=subprocess.DEVNULL)
            ts.append(time.perf_counter() - t0)
        res[label] = statistics.median(ts)
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    fast = _compiled()
    rows = []
    for name, (fn, inputs) in cases().items():
        py = getattr(_pykernels, fn)
        row = {"case": name, "python_s": _time(lambda: py(*inputs), args.repeat)}
        if fast is not None:
            cy = getattr(fast, fn)
            if cy(*inputs) != py(*inputs):
                raise SystemExit(f"backends disagree on {name}")
            row["compiled_s"] = _time(lambda: cy(*inputs), args.repeat)
            row["speedup"] = row["python_s"] / row["compiled_s"]
        rows.append(row)
    out = {"compiled_available": fast is not None, "kernels": rows}
    if fast is not None and not args.no_end_to_end:
        out["verify_n4_s"] = end_to_end(args.repeat)

    if args.json:
        print(json.dumps(out, indent=2))
        return
    if fast is None:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'case':<12} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for r in rows:
        cy = f"{r['compiled_s'] * 1e3:9.3f}ms" if "compiled_s" in r else "-"
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else "-"
        print(f"{r['case']:<12} {r['python_s'] * 1e3:9.3f}ms {cy:>10} {sp:>8}")
    if "verify_n4_s" in out:
        e = out["verify_n4_s"]
        print(f"verify --n 4: compiled {e['compiled']:.2f}s, python {e['python']:.2f}s")


if __name__ == "__main__":
    main()
