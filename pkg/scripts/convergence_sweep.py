"""Mass, volume gap and flat-distance bound along mu_i = 2^-i (eps=1, n=3, R=2).

Usage: python3 scripts/convergence_sweep.py [--stop 19] [--measure product|static] [--out DIR]
"""

import argparse
from pathlib import Path

from staticmass.checks import convergence_verdict
from staticmass.reference_geometry import ReferenceSpace
from staticmass.reporting import write_csv, write_loglog_svg
from staticmass.stability_analysis import convergence_experiment

COLUMNS = ("i", "mu", "mass", "h_o", "height_gap", "vol_gap", "vol_gap_fixed", "mass_A_plus",
           "mass_B_plus", "flat_bound", "flat_estimate")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--stop", type=int, default=19)
    ap.add_argument("--r-outer", type=float, default=2.0)
    ap.add_argument("--measure", default="product", choices=("product", "static"))
    ap.add_argument("--out", type=Path, default=Path("out/convergence"))
    args = ap.parse_args()

    space = ReferenceSpace.create(1, 3)
    sweep = convergence_experiment(space, args.r_outer, [2.0**-i for i in range(1, args.stop + 1)],
                                   measure=args.measure)
    print(" ".join(f"{c:>12}" for c in COLUMNS))
    for row in sweep.rows:
        print(" ".join(f"{getattr(row, c):12.5g}" for c in COLUMNS))
    print(f"gamma_fit (last {sweep.fit_window}) = {sweep.gamma_fit:.4f}")
    tail = sweep.rows[-1]
    print(f"flat_bound / sqrt(mass) at i={tail.i}: {tail.flat_bound / tail.mass ** 0.5:.1f}")
    for name, ok in convergence_verdict(sweep).items():
        print(f"  {name:32} {'yes' if ok else 'no'}")

    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / "sweep.csv", COLUMNS, [[getattr(r, c) for c in COLUMNS] for r in sweep.rows])
    write_loglog_svg(args.out / "sweep.svg", sweep.column("mass"), sweep.column("flat_bound"),
                     sweep.gamma_fit, sweep.fit_window)


if __name__ == "__main__":
    main()
