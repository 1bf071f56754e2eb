"""Compare the integer diagonalization paths on real boundary matrices.

    python benchmarks/bench_kernels.py [--repeat 3] [--rows 60] [--json out.json]

Matrices come from the 50-row style cylinder truncation and from barycentric
subdivisions of the torus and RP^2 examples. Every path must return the same
invariant factors; the script exits nonzero if they ever disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from morsecx import _kernels
from morsecx.examples import RP2_FACETS, torus7_facets
from morsecx.homology import simplicial_chain_complex
from morsecx.poset import face_poset, order_complex
from morsecx.simplicial import SimplicialComplex


def cylinder(rows: int, n: int = 3) -> SimplicialComplex:
    facets = []
    for i in range(rows):
        for j in range(n):
            k = (j + 1) % n
            facets += [((i, j), (i, k), (i + 1, j)), ((i, k), (i + 1, j), (i + 1, k))]
    return SimplicialComplex.from_facets(facets)


def cases(rows: int):
    subdivided = {
        "sd(torus7)": order_complex(face_poset(SimplicialComplex.from_facets(torus7_facets()))),
        "sd(rp2)": order_complex(face_poset(SimplicialComplex.from_facets(RP2_FACETS))),
        f"cylinder({rows})": cylinder(rows),
    }
    for name, sc in subdivided.items():
        cx = simplicial_chain_complex(sc)
        for k in sorted(cx.boundaries):
            yield f"{name} d{k}", cx.boundaries[k].to_dense()


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rows", type=int, default=60, help="rows of the cylinder truncation")
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args(argv)

    backends = ["numpy", "exact"]
    if _kernels.diagonalize_numba is not None:
        backends.insert(0, "numba")
        _kernels.diagonal([[2, 1], [1, 2]], "numba")  # compile outside the timed region
    else:
        print("numba is not installed; timing numpy and exact only", file=sys.stderr)

    results = []
    header = f"{'matrix':<22}{'shape':>12}" + "".join(f"{b:>12}" for b in backends)
    print(header)
    print("-" * len(header))
    for label, rows in cases(args.rows):
        shape = (len(rows), len(rows[0]) if rows else 0)
        answers = {b: _kernels.diagonal(rows, b) for b in backends}
        factors = {tuple(f) for f, _ in answers.values()}
        if len(factors) != 1:
            print(f"{label}: paths disagree: {answers}", file=sys.stderr)
            return 1
        timing = {b: best_of(lambda b=b: _kernels.diagonal(rows, b), args.repeat) for b in backends}
        results.append({"matrix": label, "shape": list(shape), "seconds": timing,
                        "paths": {b: answers[b][1] for b in backends}})
        print(f"{label:<22}{str(shape):>12}" + "".join(f"{timing[b] * 1e3:>10.2f}ms" for b in backends))

    if "numba" in backends:
        total = {b: sum(r["seconds"][b] for r in results) for b in backends}
        print("\ntotal " + ", ".join(f"{b} {t * 1e3:.1f}ms" for b, t in total.items()))
        print(f"numba speedup over numpy: {total['numpy'] / total['numba']:.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
