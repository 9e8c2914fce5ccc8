"""Benchmark the two enumeration kernels (pure Python vs compiled).

Run:  python benchmarks/bench_enum.py
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import emptysextic._enum_py as pure  # noqa: E402
from emptysextic import lattice as lat  # noqa: E402

try:
    import emptysextic._enum_fast as fast
except ImportError:
    fast = None


CASES = [
    ("E8 roots (bound 2)", lat.root_lattice("E", 8), 2),
    ("E8 bound 4", lat.root_lattice("E", 8), 4),
    ("D8+A1 bound 6", lat.direct_sum(lat.root_lattice("D", 8),
                                     lat.root_lattice("A", 1)), 6),
    ("A9+A9 bound 4", lat.direct_sum(lat.root_lattice("A", 9),
                                     lat.root_lattice("A", 9)), 4),
]


def run(kernel, gram, bound):
    t0 = time.perf_counter()
    out = kernel.enumerate_bounded(gram, bound)
    return time.perf_counter() - t0, len(out)


def main():
    print(f"{'case':28s} {'pure (s)':>10s} {'fast (s)':>10s} {'hits':>8s}")
    for name, m, bound in CASES:
        gram = [[-x for x in row] for row in m.gram]
        tp, np_ = run(pure, gram, bound)
        if fast is not None:
            tf, nf = run(fast, gram, bound)
            assert np_ == nf, "kernels disagree"
            print(f"{name:28s} {tp:10.3f} {tf:10.3f} {np_:8d}")
        else:
            print(f"{name:28s} {tp:10.3f} {'n/a':>10s} {np_:8d}")


if __name__ == "__main__":
    main()
