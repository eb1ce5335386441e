"""Time the compiled and numpy fitting kernels on the same workloads.

    python3 benchmarks/bench_ipf.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from reconstructability import _kernels
from reconstructability.lattice import Model
from reconstructability.maxent import _cell_maps
from reconstructability.prob import Scheme, random_distribution, sample_relative_frequency


def _loop(scheme):
    names = scheme.names
    comps = [[a, b] for i, a in enumerate(names) for b in names[i + 1:]]
    return Model.of(scheme, comps)


def workloads(rng):
    """(label, maps, offsets, target rows); targets come from sparse samples,
    which is what the experiment tables fit most often."""
    out = []
    for label, cards, n in [
        ("2x2x2 pairwise, n=10", (2, 2, 2), 10),
        ("2x2x2 pairwise, n=500", (2, 2, 2), 500),
        ("3x2x2 pairwise, n=1000", (3, 2, 2), 1000),
        ("3x3x3x3 pairwise, n=5000", (3, 3, 3, 3), 5000),
    ]:
        scheme = Scheme.of(*cards)
        maps, offsets, stacked = _cell_maps(_loop(scheme))
        rows = []
        for _ in range(200):
            p_hat = sample_relative_frequency(random_distribution(scheme, rng), n, rng)
            rows.append(np.bincount(
                stacked, weights=np.tile(p_hat.probs, maps.shape[0]), minlength=offsets[-1]
            ))
        out.append((label, maps, offsets, rows))
    return out


def run(fit, maps, offsets, rows):
    size = maps.shape[1]
    for targets in rows:
        fit(np.full(size, 1.0 / size), maps, targets, offsets, 1e-10, 1000)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    loads = workloads(np.random.default_rng(0))
    names = sorted(_kernels.BACKENDS)
    print(f"{'workload':<28}" + "".join(f"{n + ' us/fit':>18}" for n in names) + f"{'speedup':>10}")
    for label, maps, offsets, rows in loads:
        per_fit = {}
        for name in names:
            t = min(timeit.repeat(
                lambda: run(_kernels.BACKENDS[name], maps, offsets, rows),
                number=1, repeat=args.repeat,
            ))
            per_fit[name] = 1e6 * t / len(rows)
        speed = per_fit["python"] / per_fit["cython"] if "cython" in per_fit else float("nan")
        print(f"{label:<28}" + "".join(f"{per_fit[n]:18.1f}" for n in names) + f"{speed:10.1f}x")


if __name__ == "__main__":
    main()
