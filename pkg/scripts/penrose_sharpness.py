"""Penrose gap of Kottler-Schwarzschild graphs as the outer radius grows.

Prints the gap for eps = 0 (which tends to zero) and, for eps = -1, compares
the linear and square-root horizon constants below and above r0 = sqrt(2).
"""

import math

from staticmass.graph_manifold import build_kottler_schwarzschild_graph
from staticmass.quasilocal_energy import brown_york_energy, penrose_gap, penrose_rhs
from staticmass.reference_geometry import ReferenceSpace


def main():
    flat = ReferenceSpace.create(0, 3)
    print("eps=0, n=3, mu=0.5")
    print(f"{'R':>8} {'mass':>14} {'rhs':>8} {'gap':>12}")
    for r_outer in (2.0, 5.0, 10.0, 100.0, 1e3, 1e4):
        g = build_kottler_schwarzschild_graph(flat, 0.5, r_outer)
        print(f"{r_outer:8g} {brown_york_energy(g):14.10f} {penrose_rhs(g):8.4f} "
              f"{penrose_gap(g):12.4e}")

    hyp = ReferenceSpace.create(-1, 3)
    print("\neps=-1, n=3, R=4: gap with each horizon constant")
    print(f"{'r0':>6} {'linear':>12} {'sqrt':>12}")
    for r0 in (1.05, 1.2, 1.4, math.sqrt(2), 1.6, 2.5):
        mu = 0.5 * (r0**3 - r0)
        g = build_kottler_schwarzschild_graph(hyp, mu, 4.0)
        print(f"{r0:6.3f} {penrose_gap(g, 'linear'):12.4e} {penrose_gap(g, 'sqrt'):12.4e}")


if __name__ == "__main__":
    main()
