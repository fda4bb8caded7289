"""Sweep lambda and record how many closed rotational profiles shooting finds.

Writes a CSV (lambda, roots, radii, predicted radii) and prints a short table.
Below sqrt(2n) nothing should close; above it, the two round spheres appear.
"""
import argparse
import csv
import math
import sys
import time

import numpy as np

from expander_lab import ExpanderSpec, radii_for_lambda, shoot_closed


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--lam-min", type=float, default=1.0)
    ap.add_argument("--lam-max", type=float, default=4.0)
    ap.add_argument("--steps", type=int, default=13)
    ap.add_argument("--samples", type=int, default=512)
    ap.add_argument("--out", default="lambda_sweep.csv")
    args = ap.parse_args(argv)

    rows = []
    for lam in np.linspace(args.lam_min, args.lam_max, args.steps):
        t0 = time.perf_counter()
        res = shoot_closed(ExpanderSpec(args.n, float(lam)), n_samples=args.samples)
        radii = sorted(r for _, r in res.roots)
        predicted = radii_for_lambda(args.n, float(lam))
        rows.append((float(lam), len(radii), radii, predicted))
        print(f"lambda={lam:6.3f}  roots={len(radii)}  radii={[round(r, 6) for r in radii]}  "
              f"predicted={[round(r, 6) for r in predicted]}  ({time.perf_counter() - t0:.1f}s)")

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "roots", "radii", "predicted"])
        for lam, k, radii, pred in rows:
            w.writerow([lam, k, ";".join(map(repr, radii)), ";".join(map(repr, pred))])
    gap = math.sqrt(2 * args.n)
    below = [k for lam, k, _, _ in rows if lam < gap - 1e-9]
    print(f"gap sqrt(2n) = {gap:.4f}; roots found below it: {sum(below)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
