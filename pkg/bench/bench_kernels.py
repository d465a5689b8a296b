"""Compiled vs pure-Python kernels: raw kernel timings and end-to-end matrix assembly.

Run:  python3 bench/bench_kernels.py [--repeat 3]
The end-to-end numbers come from subprocesses so each backend starts cold.
"""
import argparse
import os
import subprocess
import sys
import time

from qkdv import _kernels_py as ref

try:
    from qkdv import _kernels as fast
except ImportError:
    fast = None


def best(fn, repeat):
    t = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        t.append(time.perf_counter() - t0)
    return min(t)


def kernel_cases():
    from qkdv.fermion import FermionOpSpec, _Space, _quads
    n, L2 = 7, 15
    space = _Space(n, n + (L2 + 1) // 2 + 1)
    words = [FermionOpSpec.xi(*q).word(space.codec) for q in _quads(L2)]
    return {
        "word_table (n=7, |mode|<=15/2)": lambda k: k.word_table(space.masks, words),
        "moments_by_size (N=40, e<=9)": lambda k: k.moments_by_size(40, 9),
    }


END_TO_END = {
    "ghat1_matrix(6, 8)": "from qkdv.fermion import ghat1_matrix; ghat1_matrix(6, 8)",
    "q_bracket weight 8, N=40": ("from qkdv.lab import q_bracket; from qkdv.shifted import QExpr;"
                                 "q_bracket(QExpr.Q(4, 2, 2), 40)"),
}


def cold(code, pure):
    env = dict(os.environ)
    if pure:
        env["QKDV_PURE_PYTHON"] = "1"
    wrapped = f"import time; t=time.perf_counter(); {code}; print(time.perf_counter()-t)"
    out = subprocess.run([sys.executable, "-c", wrapped], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if fast is None:
        print("compiled kernels not built; nothing to compare")
        return
    print(f"{'case':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in kernel_cases().items():
        tp = best(lambda: fn(ref), args.repeat)
        tc = best(lambda: fn(fast), args.repeat)
        print(f"{name:40s} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}x")
    for name, code in END_TO_END.items():
        tp = min(cold(code, True) for _ in range(args.repeat))
        tc = min(cold(code, False) for _ in range(args.repeat))
        print(f"{name:40s} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
