"""Replicate the walk-on-spheres disk-arc estimate over many seeds and report the 3σ coverage."""

import argparse
import math
import sys

from innerlab import serialization
from innerlab.harmonic import BoundaryPartition, disk_polygon, wos_harmonic_measure


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--walks", type=float, default=1e6)
    p.add_argument("--arc", type=float, default=math.pi / 2, help="arc length α; exact answer α/2π")
    args = p.parse_args(argv)
    disk = disk_polygon()
    parts = BoundaryPartition.by_angle(disk, 0.0, args.arc)
    exact = args.arc / (2 * math.pi)
    rows = []
    for seed in range(args.seeds):
        est = wos_harmonic_measure(disk, 0j, parts, int(args.walks), seed=seed)
        z = (est.estimates[0] - exact) / est.sigmas[0]
        rows.append({"seed": seed, "estimate": est.estimates[0], "sigma": est.sigmas[0], "z": z})
    coverage = sum(abs(r["z"]) <= 3 for r in rows) / len(rows)
    print(serialization.dumps({"exact": exact, "coverage_3sigma": coverage, "replications": rows}))
    return 0 if coverage >= 0.99 else 1


if __name__ == "__main__":
    sys.exit(main())
