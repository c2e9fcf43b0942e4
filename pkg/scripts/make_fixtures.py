"""Write example inputs for the command line: Blaschke products, measures, a mask and strip CSVs."""

import argparse
import csv
import math
import pathlib

import numpy as np

from innerlab import mobius_blaschke as mb
from innerlab import serialization
from innerlab.extremal import notch_domain, write_pgm_mask
from innerlab.measures import CircleMeasure
from innerlab.thickness import strip_fixture


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="fixtures")
    args = p.parse_args(argv)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    serialization.dump(mb.BlaschkeProduct(((0j, 2),)).to_dict(), out / "z2.json")
    serialization.dump(mb.motivating_family(16).to_dict(), out / "F16.json")
    serialization.dump(CircleMeasure.dirac(0.0).to_dict(), out / "dirac0.json")
    serialization.dump(CircleMeasure.dirac(math.pi).to_dict(), out / "dirac_pi.json")
    serialization.dump(CircleMeasure.lebesgue().to_dict(), out / "lebesgue.json")

    g = notch_domain(2.0, 0.2, 0.02)
    write_pgm_mask(out / "notch.pgm", g.mask)
    serialization.dump({"mode": "halves"}, out / "notch_marking.json")

    for name in ("inverse-square", "inverse"):
        U, _ = strip_fixture(name)
        with open(out / f"strip_{name}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "h1", "h2"])
            w.writerows((f"{a:.17g}", f"{b:.17g}", f"{c:.17g}") for a, b, c in zip(U.x, U.h1, U.h2))

    n = 1 << 12
    theta = 2 * np.pi * np.arange(n) / n
    with open(out / "disk_h.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["h"])
        w.writerows([f"{v:.17g}"] for v in np.abs(np.exp(1j * theta) - 1) ** 1.5)
    print(f"wrote fixtures to {out}/")


if __name__ == "__main__":
    main()
