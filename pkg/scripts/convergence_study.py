"""Convergence orders: RK4 on the sphere profile and the scalar identities on a revolved path.

Prints one table per study; nothing is written to disk unless --out is given.
"""
import argparse
import json
import math
import sys

import numpy as np

from expander_lab import (ExpanderSpec, integrate_from, integrate_profile, radii_for_lambda,
                          revolve, scalar_identity_residuals)
from expander_lab.profile import ProfileState


def circle(s, r):
    return -r * math.cos(s / r), r * math.sin(s / r), math.pi / 2 - s / r


def rk_study(n, lam, steps):
    out = []
    for r in radii_for_lambda(n, lam):
        spec = ExpanderSpec(n, lam)
        s0, s1 = 0.3 * r, 2.5 * r
        errs = []
        for h in steps:
            h = (s1 - s0) / round((s1 - s0) / h)
            p = integrate_from(ProfileState(s0, *circle(s0, r)), spec, s1, h)
            exact = circle(p.s[-1], r)
            errs.append(max(abs(p.u[-1] - exact[0]), abs(p.v[-1] - exact[1]),
                            abs(p.theta[-1] - exact[2])))
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        out.append({"radius": r, "h": list(steps), "errors": errs, "orders": orders})
    return out


def identity_study(lam, u0, s_stop, spacings):
    path = integrate_profile(u0, ExpanderSpec(2, lam)).truncated(s_stop)
    rev = revolve(path).with_domain([(0.3, s_stop - 0.2), (0.0, 0.5)])
    table = {}
    for h in spacings:
        for rep in scalar_identity_residuals(rev, h=h):
            table.setdefault(rep.identity_name, []).append((h, rep.max_abs, rep.order_estimate))
    return table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=3.0)
    ap.add_argument("--u0", type=float, default=-1.5)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    rk = rk_study(2, args.lam, (0.1, 0.05, 0.025, 0.0125))
    print("RK4 endpoint error against the exact circle")
    for row in rk:
        print(f"  r={row['radius']:.6f}  errors={['%.2e' % e for e in row['errors']]}  "
              f"orders={['%.3f' % o for o in row['orders']]}")

    ids = identity_study(args.lam, args.u0, 2.2, (0.08, 0.04, 0.02))
    print("scalar identities on the revolved profile (max residual, order under h -> h/2)")
    for name, rows in ids.items():
        cells = "  ".join(f"h={h:.3f}: {e:.2e} ({o:.2f})" for h, e, o in rows)
        print(f"  {name:34s} {cells}")
    worst = min(o for rows in ids.values() for _, _, o in rows)
    print(f"lowest identity order: {worst:.3f}")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"rk": rk, "identities": {k: [list(map(float, r)) for r in v]
                                                for k, v in ids.items()}}, fh, indent=2)
    return 0 if worst >= 1.8 and min(o for row in rk for o in row["orders"]) >= 3.9 else 1


if __name__ == "__main__":
    sys.exit(main())
