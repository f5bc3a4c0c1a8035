"""Time the exhaustive oracle with numba kernels and with the pure-Python fallback.

    python3 benchmarks/bench_oracle.py --max-n 5 --repeat 3

Each mode runs in a fresh interpreter because the JIT switch is read at import.
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from gradedposets import _kernels as K
from gradedposets._jit import JIT_ENABLED

max_n, repeat = int(sys.argv[1]), int(sys.argv[2])
t0 = time.perf_counter()
K.classify_all(np.zeros((1, 1), np.uint8))
warm = time.perf_counter() - t0
rows = []
for n in range(1, max_n + 1):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        table = np.zeros((1, 0), np.uint8)
        for _ in range(n):
            table = K.extend_level(table)
        flags, heights = K.classify_all(table)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    rows.append({"n": n, "posets": len(table), "seconds": best,
                 "checksum": int(flags.astype(np.int64).sum() + heights.astype(np.int64).sum())})
print(json.dumps({"jit": JIT_ENABLED, "warmup": warm, "rows": rows}))
"""


def run_mode(disable: bool, max_n: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("GRADEDPOSETS_DISABLE_JIT", None)
    if disable:
        env["GRADEDPOSETS_DISABLE_JIT"] = "1"
    res = subprocess.run([sys.executable, "-c", CHILD, str(max_n), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    jit = run_mode(False, args.max_n, args.repeat)
    py = run_mode(True, args.max_n, args.repeat)
    print(f"warm-up: numba {jit['warmup']:.3f}s, python {py['warmup']:.3f}s")
    print(f"{'n':>2}  {'posets':>7}  {'numba s':>10}  {'python s':>10}  {'speedup':>8}  same")
    for a, b in zip(jit["rows"], py["rows"]):
        speed = b["seconds"] / a["seconds"] if a["seconds"] > 0 else float("inf")
        same = a["checksum"] == b["checksum"] and a["posets"] == b["posets"]
        print(f"{a['n']:>2}  {a['posets']:>7}  {a['seconds']:>10.4f}  {b['seconds']:>10.4f}  {speed:>8.1f}  {same}")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
