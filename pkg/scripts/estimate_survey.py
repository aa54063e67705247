"""Random survey of the height and volume estimates over admissible draws.

Reports the largest ratio lhs/rhs per (eps, n); values below 1 mean the estimate holds.
"""

import argparse
import os

import numpy as np

from staticmass.graph_manifold import build_kottler_schwarzschild_graph, horizon_radius
from staticmass.reference_geometry import ReferenceSpace
from staticmass.stability_analysis import (
    StabilityConstants,
    height_bound_check,
    volume_estimate_check,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=50)
    args = ap.parse_args()
    rng = np.random.default_rng(int(os.environ.get("STATICMASS_SEED", "0")))
    print(f"{'eps':>4} {'n':>3} {'max gap/rhs':>12} {'max vol/rhs':>12}")
    for eps in (1, 0, -1):
        for n in (3, 4, 5):
            sp = ReferenceSpace.create(eps, n)
            worst_h = worst_v = 0.0
            for _ in range(args.draws):
                mu = 10.0 ** rng.uniform(-4, 0)
                g = build_kottler_schwarzschild_graph(sp, mu, horizon_radius(sp, mu)
                                                      + rng.uniform(0.05, 4.0))
                k = StabilityConstants.for_graph(g)
                hb, ve = height_bound_check(g, k), volume_estimate_check(g, k)
                worst_h = max(worst_h, hb.gap / hb.rhs)
                worst_v = max(worst_v, ve.lhs / ve.rhs)
            print(f"{eps:4d} {n:3d} {worst_h:12.4f} {worst_v:12.4f}")


if __name__ == "__main__":
    main()
