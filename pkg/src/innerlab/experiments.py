"""Named experiments producing schema-checked reports.

Every scalar result records its value, the reference it is compared with,
the tolerance, where the reference comes from ("closed-form" or
"computed"), and whether it passed. A report passes when all results do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import serialization
from .errors import ValidationError

REPORT_SCHEMA = {
    "type": "object",
    "required": ["name", "parameters", "seed", "results", "tables", "passed"],
    "properties": {
        "name": {"type": "string"},
        "parameters": {"type": "object"},
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "results": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["value", "reference", "tolerance", "provenance", "passed"],
                "properties": {
                    "value": {"type": ["number", "string", "boolean"]},
                    "reference": {"type": ["number", "string", "boolean"]},
                    "tolerance": {"type": ["number", "string"]},
                    "provenance": {"enum": ["computed", "closed-form"]},
                    "passed": {"type": "boolean"},
                },
            },
        },
        "tables": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "object"}},
        },
    },
}


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    seed: int = 0
    results: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r["passed"] for r in self.results.values())

    def check(self, key, value, reference, tol, provenance="closed-form", relative=False, compare="abs"):
        """Record |value - reference| <= tol (or a one-sided / boolean comparison)."""
        if compare == "abs":
            err = abs(value - reference)
            if relative:
                err /= max(abs(reference), 1e-300)
            ok = bool(err <= tol)
        elif compare == "le":
            ok = bool(value <= reference + tol)
        elif compare == "eq":
            ok = bool(value == reference)
        else:
            raise ValidationError(f"unknown comparison {compare!r}")
        self.results[key] = {"value": value, "reference": reference, "tolerance": tol,
                             "provenance": provenance, "passed": ok}
        return ok

    def to_dict(self):
        return {"name": self.name, "parameters": self.parameters, "seed": int(self.seed),
                "results": self.results, "tables": self.tables, "passed": self.passed}

    def to_json(self):
        data = serialization.loads(serialization.dumps(self.to_dict()))
        jsonschema.validate(data, REPORT_SCHEMA)
        return serialization.dumps(data)

    @classmethod
    def from_dict(cls, data):
        jsonschema.validate(data, REPORT_SCHEMA)
        return cls(data["name"], data["parameters"], data["seed"], data["results"], data["tables"])


def _motivating(params, seed):
    from .measures import DiskMeasure, weak_distance
    from .mobius_blaschke import motivating_family, mu_of, nu_of

    ns = [int(n) for n in params.get("ns", [4, 16, 64, 256])]
    report = ExperimentReport("motivating", {"ns": ns}, seed)
    target_mu, target_nu = DiskMeasure.dirac(-1.0), DiskMeasure.dirac(0.0)
    rows = []
    for n in ns:
        F = motivating_family(n)
        mu, nu = mu_of(F), nu_of(F)
        d_mu, d_nu = weak_distance(mu, target_mu), weak_distance(nu, target_nu)
        report.check(f"mu_distance_n{n}", d_mu, 1.0 / n, 1e-12)
        report.check(f"mu_mass_n{n}", mu.total_mass, 1.0, 1e-12)
        report.check(f"nu_distance_n{n}", d_nu, 0.0, 1e-12)
        rows.append({"n": n, "mu_distance": d_mu, "nu_distance": d_nu, "mu_mass": mu.total_mass,
                     "reference": 1.0 / n})
    report.tables["mu-distance"] = rows
    return report


def _continuity(params, seed):
    from .components import RoundDisk, escaping_green_sum

    ns = [int(n) for n in params.get("ns", [10, 100, 1000])]
    V = params.get("V", [0.0, 0.0, 0.5])
    V = RoundDisk(complex(V[0], V[1]), V[2]) if not isinstance(V, RoundDisk) else V
    family = params.get("family", "motivating")
    split = float(params.get("split_radius", 0.5))
    report = ExperimentReport("continuity", {"ns": ns, "V": [V.center.real, V.center.imag, V.radius],
                                             "family": family, "split_radius": split}, seed)
    rows = []
    for n in ns:
        value = escaping_green_sum(family, n, V, 0j, split)
        closed = n * math.log(1.0 / (1.0 - 1.0 / n)) if family == "motivating" and V.contains(0j) else math.nan
        report.check(f"limit_gap_n{n}", value, 1.0, 2.0 / n, provenance="closed-form")
        if math.isfinite(closed):
            report.check(f"closed_form_n{n}", value, closed, 1e-9, relative=True)
        rows.append({"n": n, "green_sum": value, "closed_form": closed, "limit": 1.0})
    report.tables["green-sum"] = rows
    return report


def _island(params, seed):
    from .components import RoundDisk, island_classify
    from .mobius_blaschke import BlaschkeProduct, motivating_family

    cases = params.get("cases", [
        {"blaschke": "z^2", "V": [0.5, 0.0, 0.1], "degrees": [1, 1], "simple": True},
        {"blaschke": "z^2", "V": [0.0, 0.0, 0.25], "degrees": [2], "simple": False},
        {"blaschke": "F_6", "V": [0.5, 0.0, 0.05], "degrees": [1] * 7, "simple": True},
    ])
    res = int(params.get("grid_res", 512))
    report = ExperimentReport("island", {"cases": cases, "grid_res": res}, seed)
    rows = []
    for k, case in enumerate(cases):
        name = case["blaschke"]
        B = BlaschkeProduct(((0j, 2),)) if name == "z^2" else motivating_family(int(name.split("_")[1]))
        V = RoundDisk(complex(case["V"][0], case["V"][1]), case["V"][2])
        rep = island_classify(B, V, res)
        degrees = sorted(c.degree for c in rep.per_component)
        rh = all(c.degree == 1 + c.critical_multiplicity for c in rep.per_component)
        report.check(f"case{k}_degrees", str(degrees), str(sorted(case["degrees"])), "exact", compare="eq",
                     provenance="computed")
        report.check(f"case{k}_simple_islands", rep.simple_islands, bool(case["simple"]), "exact", compare="eq")
        report.check(f"case{k}_riemann_hurwitz", rh, True, "exact", compare="eq", provenance="computed")
        report.check(f"case{k}_degree_sum", sum(degrees), B.degree, 0, compare="eq", provenance="computed")
        rows.append({"case": k, "blaschke": name, "degrees": degrees,
                     "distance": rep.distance_to_critical_values, "simple_islands": rep.simple_islands})
    report.tables["components"] = rows
    return report


def _jensen(params, seed):
    from .mobius_blaschke import jensen_residual, random_blaschke

    count = int(params.get("products", 50))
    points = int(params.get("points", 20))
    max_degree = int(params.get("max_degree", 6))
    rng = np.random.default_rng(seed)
    report = ExperimentReport("jensen", {"products": count, "points": points, "max_degree": max_degree}, seed)
    worst = 0.0
    rows = []
    for k in range(count):
        B = random_blaschke(rng, int(rng.integers(2, max_degree + 1)), 0.9)
        r = 0.9 * np.sqrt(rng.uniform(size=points))
        z = r * np.exp(2j * np.pi * rng.uniform(size=points))
        residual = max(jensen_residual(B, complex(w)) for w in z)
        worst = max(worst, residual)
        rows.append({"product": k, "degree": B.degree, "max_residual": residual})
    report.check("max_residual", worst, 0.0, 1e-6, provenance="closed-form")
    report.tables["residuals"] = rows
    return report


def _thickness_suite(params, seed):
    from .extremal import rw_criterion
    from .thickness import DYADIC_WINDOWS, is_thick_strip, strip_fixture, strip_integral_verdict

    delta = float(params.get("delta", 0.01))
    families = params.get("families", ["inverse-square", "inverse"])
    report = ExperimentReport("thickness-suite", {"delta": delta, "families": families}, seed)
    rows = []
    for name in families:
        U, analytic = strip_fixture(name)
        area = is_thick_strip(U, DYADIC_WINDOWS)
        rw = rw_criterion(U, DYADIC_WINDOWS, delta=delta)
        integral = strip_integral_verdict(U, DYADIC_WINDOWS)
        report.check(f"{name}_area", area.verdict.value, analytic.value, "exact", compare="eq", provenance="computed")
        report.check(f"{name}_rw", rw.verdict.value, analytic.value, "exact", compare="eq", provenance="computed")
        report.check(f"{name}_integral", integral.verdict.value, analytic.value, "exact", compare="eq",
                     provenance="computed")
        for k, (a, b) in enumerate(DYADIC_WINDOWS):
            rows.append({"family": name, "window": k, "x1": a, "x2": b, "area_deficit": area.values[k],
                         "rw_excess": rw.values[k], "strip_integral": integral.values[k]})
    report.tables["window-deficit"] = rows
    return report


def _clark_suite(params, seed):
    from .harmonic import clark_pushforward, disk_polygon, half_disk_oracle, right_half_disk
    from .measures import CircleMeasure
    from .thickness import moebius_oracle

    n_walks = int(params.get("n_walks", 100_000))
    a = params.get("moebius_a", [0.4, 0.2])
    report = ExperimentReport("clark-suite", {"n_walks": n_walks, "moebius_a": a}, seed)
    mu = CircleMeasure(((0.3, 0.5), (2.0, 0.25)), (0.2, 0.4, 0.1))
    oracle = moebius_oracle(complex(a[0], a[1]))
    res = clark_pushforward(disk_polygon(1000), oracle, mu)
    report.check("moebius_total", res.total, res.expected, 1e-6)
    x = mu.atom_thetas[0]
    report.check("moebius_atom", res.boundary.atoms[0][1] / mu.atom_masses[0],
                 abs(complex(oracle.derivative(np.exp(1j * x)))), 1e-6)
    half = half_disk_oracle(0.5)
    res = clark_pushforward(right_half_disk(), half, CircleMeasure.dirac(0.0), n_walks, seed)
    report.check("half_disk_atom", res.boundary.total_mass, 8.0 / 9.0, 1e-9)
    report.check("half_disk_total", res.total, res.expected, 3.0 * res.sigma, provenance="closed-form")
    report.tables["clark"] = [{"fixture": "half_disk", "interior": res.interior.total_mass,
                               "boundary": res.boundary.total_mass, "total": res.total,
                               "expected": res.expected, "sigma": res.sigma}]
    return report


def _entropy_growth(params, seed):
    from .mobius_blaschke import entropy, eval as evaluate, motivating_family, motivating_limit

    ns = [int(n) for n in params.get("ns", [2, 4, 8, 16, 32, 64])]
    report = ExperimentReport("entropy-growth", {"ns": ns}, seed)
    S = motivating_limit()
    r = 0.9 * np.sqrt(np.linspace(0.0, 1.0, 40))
    grid = (r[:, None] * np.exp(2j * np.pi * np.arange(64) / 64)[None, :]).ravel()
    rows = []
    for n in ns:
        F = motivating_family(n)
        value = entropy(F)
        closed = math.log((n + 1) * (2 * n - 1) / n**2)
        sup = float(np.max(np.abs(evaluate(F, grid) - evaluate(S, grid))))
        report.check(f"entropy_n{n}", value, closed, 1e-9)
        rows.append({"n": n, "entropy": value, "closed_form": closed, "sup_distance": sup})
    entropies = [row["entropy"] for row in rows]
    sups = [row["sup_distance"] for row in rows]
    # Bounded entropy along the family, decreasing to log 2.
    report.check("entropy_nonincreasing", bool(np.all(np.diff(entropies) <= 1e-12)), True, "exact", compare="eq",
                 provenance="computed")
    report.check("entropy_bound", max(entropies), math.log(2.25), 1e-9, compare="le")
    report.check("sup_distance_decreasing", bool(np.all(np.diff(sups) < 0)), True, "exact", compare="eq",
                 provenance="computed")
    report.tables["entropy"] = rows
    return report


EXPERIMENTS = {
    "motivating": _motivating,
    "continuity": _continuity,
    "island": _island,
    "jensen": _jensen,
    "thickness-suite": _thickness_suite,
    "clark-suite": _clark_suite,
    "entropy-growth": _entropy_growth,
}


def run_experiment(name: str, params: dict | None = None, seed: int = 0) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    report = EXPERIMENTS[name](dict(params or {}), int(seed))
    jsonschema.validate(serialization.loads(serialization.dumps(report.to_dict())), REPORT_SCHEMA)
    return report
