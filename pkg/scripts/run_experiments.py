"""Run every named experiment, writing canonical JSON reports and their SVG plots."""

import argparse
import pathlib
import sys

from innerlab.experiments import EXPERIMENTS, run_experiment
from innerlab.plotting import PLOTS, emit_plot

PLOT_FOR = {"motivating": ["mu-distance"], "continuity": ["green-sum"], "jensen": ["jensen"],
            "thickness-suite": ["window-deficit"], "entropy-growth": ["entropy"]}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="reports")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("names", nargs="*", default=sorted(EXPERIMENTS))
    args = p.parse_args(argv)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in args.names:
        report = run_experiment(name, seed=args.seed)
        (out / f"{name}.json").write_text(report.to_json() + "\n", encoding="utf-8")
        for kind in PLOT_FOR.get(name, []):
            assert kind in PLOTS
            (out / f"{name}-{kind}.svg").write_text(emit_plot(report, kind), encoding="utf-8")
        print(f"{name:16s} {'passed' if report.passed else 'FAILED'}")
        if not report.passed:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
