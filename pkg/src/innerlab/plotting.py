"""SVG plots of experiment reports, byte-identical for a fixed report."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ValidationError  # noqa: E402

# kind -> (table, x column, y columns, reference line or column, log axes)
PLOTS = {
    "mu-distance": ("mu-distance", "n", ["mu_distance"], "reference", True),
    "window-deficit": ("window-deficit", "window", ["area_deficit", "rw_excess", "strip_integral"], None, False),
    "green-sum": ("green-sum", "n", ["green_sum"], 1.0, False),
    "entropy": ("entropy", "n", ["entropy"], "closed_form", False),
    "jensen": ("residuals", "product", ["max_residual"], None, False),
}


def _table(report):
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return data.get("tables", {}), data.get("name", "report"), data.get("results", {})


def emit_plot(report, kind: str) -> str:
    """Standalone SVG for a named series of a report."""
    if kind not in PLOTS:
        raise ValidationError(f"unknown plot kind {kind!r}; choose from {sorted(PLOTS)}")
    table_name, xcol, ycols, ref, loglog = PLOTS[kind]
    tables, name, _ = _table(report)
    rows = tables.get(table_name)
    if not rows:
        raise ValidationError(f"report {name!r} has no series {table_name!r} for plot {kind!r}")
    with plt.rc_context({"svg.hashsalt": "innerlab", "svg.fonttype": "none", "font.size": 9}):
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        groups = sorted({row.get("family", "") for row in rows})
        for group in groups:
            sub = [r for r in rows if r.get("family", "") == group]
            xs = [r[xcol] for r in sub]
            for col in ycols:
                label = f"{group} {col}".strip()
                ax.plot(xs, [float(r[col]) for r in sub], marker="o", label=label)
        xs = [r[xcol] for r in rows]
        if isinstance(ref, str):
            ax.plot(xs, [float(r[ref]) for r in rows], "k--", lw=0.8, label=ref)
        elif ref is not None:
            ax.axhline(ref, color="k", ls="--", lw=0.8, label=f"limit {ref:g}")
        _tolerance_band(ax, kind, rows, xcol)
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xcol)
        ax.set_title(f"{name}: {kind}")
        ax.legend(fontsize=7)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": "innerlab"})
        plt.close(fig)
    return buf.getvalue()


def _tolerance_band(ax, kind, rows, xcol):
    if kind == "green-sum":
        xs = sorted(r[xcol] for r in rows)
        ax.fill_between(xs, [1 - 2.0 / n for n in xs], [1 + 2.0 / n for n in xs], color="0.85",
                        label="1 ± 2/n")
        ax.set_xscale("log")
