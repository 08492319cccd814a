"""Benchmark the compiled antichain kernel against the pure-Python fallback.

Two layers:
  * micro — the eight kernel ops on seeded random cylinder batches, run
    against both implementations in-process (results are asserted equal);
  * macro — a full even-zeros table build (truncation 3, depth 12) in a
    subprocess, once per kernel, selected via DIVMART_PURE_KERNEL.

Usage: python3 benchmarks/bench_kernel.py [--repeat N] [--batch N]
"""

import argparse
import random
import subprocess
import sys
import time

from divmart import _kernel_py

try:
    from divmart import _kernel
except ImportError:
    _kernel = None


def deep_antichain(rng: random.Random, count: int, depth: int = 26):
    """Distinct same-length cylinders: the shape witness families take."""
    values = rng.sample(range(1 << depth), count)
    return tuple(sorted((depth, v) for v in values))


def timed(fn, *args, repeat: int):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def run_micro(repeat: int, batch: int) -> None:
    rng = random.Random(0xD1AD1C)
    deep_a = deep_antichain(rng, batch)
    deep_b = deep_antichain(rng, batch)
    raw_a = list(deep_a) + list(deep_b)
    rng.shuffle(raw_a)
    impls = [("python", _kernel_py)] + ([("cython", _kernel)] if _kernel else [])

    cases = []
    for name, impl in impls:
        a = impl.normalize(deep_a)
        b = impl.normalize(deep_b)
        u = impl.union(a, b)
        cases.append(
            (
                name,
                [
                    ("normalize", impl.normalize, (raw_a,)),
                    ("union", impl.union, (a, b)),
                    ("intersect", impl.intersect, (a, b)),
                    ("complement", impl.complement, (u,)),
                    ("measure", impl.measure, (u,)),
                    ("covers", impl.covers, (u, 30, 0)),
                    ("meets", impl.meets, (u, 30, 1)),
                    ("max_len", impl.max_len, (u,)),
                ],
            )
        )

    rows = {}
    parity = {}
    for name, ops in cases:
        for op, fn, args in ops:
            result, best = timed(fn, *args, repeat=repeat)
            rows.setdefault(op, {})[name] = best
            parity.setdefault(op, []).append(result)

    for op, results in parity.items():
        if len(results) == 2 and results[0] != results[1]:
            raise SystemExit(f"kernel parity violation in {op}")

    print(f"micro ops on two {batch}-cylinder depth-26 antichains (best of {repeat}):")
    header = f"{'op':<12}{'python':>12}"
    if _kernel:
        header += f"{'cython':>12}{'speedup':>10}"
    print(header)
    for op, r in rows.items():
        line = f"{op:<12}{r['python'] * 1e6:>10.1f}us"
        if _kernel:
            speed = r["python"] / r["cython"] if r["cython"] else float("inf")
            line += f"{r['cython'] * 1e6:>10.1f}us{speed:>9.1f}x"
        print(line)


_MACRO = (
    "import time; t0 = time.perf_counter();"
    "from divmart.sets import EvenZeros, SigmaThreeSet;"
    "from divmart.synthesis import sigma3_pipeline;"
    "from divmart import KERNEL_NAME;"
    "table = sigma3_pipeline(SigmaThreeSet([EvenZeros()])).truncated_table(3, 12);"
    "print(KERNEL_NAME, time.perf_counter() - t0)"
)


def run_macro() -> None:
    print("\nmacro: even-zeros truncated_table(3, 12), one subprocess per kernel:")
    timings = {}
    for env_val in (None, "1"):
        import os

        env = dict(os.environ)
        if env_val:
            env["DIVMART_PURE_KERNEL"] = env_val
        else:
            env.pop("DIVMART_PURE_KERNEL", None)
        out = subprocess.run(
            [sys.executable, "-c", _MACRO], env=env, capture_output=True, text=True
        )
        if out.returncode != 0:
            raise SystemExit(out.stderr)
        name, elapsed = out.stdout.split()
        timings[name] = float(elapsed)
        print(f"  {name:<8}{float(elapsed):.3f}s")
    if "cython" in timings and "python" in timings:
        print(f"  speedup {timings['python'] / timings['cython']:.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=25)
    parser.add_argument("--batch", type=int, default=2000)
    args = parser.parse_args()
    if _kernel is None:
        print("compiled kernel not built; benchmarking fallback only")
    run_micro(args.repeat, args.batch)
    run_macro()


if __name__ == "__main__":
    main()
