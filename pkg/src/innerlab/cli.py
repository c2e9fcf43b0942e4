"""innerlab command line.

Every subcommand writes canonical JSON (or SVG for ``plot``) to stdout or
``--out``. ``experiment`` exits with status 1 when a tolerance is missed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import serialization
from .errors import DomainError, NumericalError, ValidationError

log = logging.getLogger("innerlab")


def _point(text):
    x, y = (float(t) for t in text.split(","))
    return complex(x, y)


def _emit(args, payload):
    text = payload if isinstance(payload, str) else serialization.dumps(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        sys.stdout.write(text + "\n")


def _load_blaschke(path):
    from .mobius_blaschke import BlaschkeProduct

    return BlaschkeProduct.from_dict(serialization.load(path))


def _load_circle_measure(path):
    from .measures import CircleMeasure

    return CircleMeasure.from_dict(serialization.load(path))


def _load_any_measure(path):
    from .measures import CircleMeasure, DiskMeasure

    data = serialization.load(path)
    if data.get("kind") == "disk" or (data.get("atoms") and "re" in data["atoms"][0]):
        return DiskMeasure.from_dict(data)
    return CircleMeasure.from_dict(data)


NAMED_DOMAINS = ("disk", "upper_half_disk", "right_half_disk", "square", "cusp")


def _domain(text):
    from . import harmonic

    if text in NAMED_DOMAINS:
        return {"disk": harmonic.disk_polygon, "upper_half_disk": harmonic.upper_half_disk,
                "right_half_disk": harmonic.right_half_disk, "square": harmonic.square,
                "cusp": harmonic.cusp_domain}[text]()
    return harmonic.PolylineJordanDomain.from_dict(serialization.load(text))


def _parts(text, omega):
    from .harmonic import BoundaryPartition

    if text == "circle-vs-rest":
        return BoundaryPartition.circle_vs_rest(omega)
    if text == "by-direction":
        return BoundaryPartition.by_direction(omega)
    if text.startswith("arc:"):
        t0, t1 = (float(t) for t in text[4:].split(","))
        return BoundaryPartition.by_angle(omega, t0, t1)
    return BoundaryPartition.from_dict(serialization.load(text))


def _map(text):
    from .harmonic import half_disk_oracle
    from .thickness import identity_oracle, moebius_oracle

    if text is None or text == "none":
        return None
    name, _, arg = text.partition(":")
    if name == "identity":
        return identity_oracle()
    if name == "moebius":
        return moebius_oracle(_point(arg))
    if name == "right-half-disk":
        return half_disk_oracle(float(arg) if arg else 0.5)
    raise ValidationError(f"unknown map {text!r}")


def cmd_blaschke(args):
    from . import mobius_blaschke as mb

    B = _load_blaschke(args.file)
    if args.op == "critical":
        return {"critical_points": [{"re": c.real, "im": c.imag, "mult": m} for c, m in mb.critical_points(B)]}
    if args.op == "entropy":
        return {"entropy": mb.entropy(B, args.quadrature)}
    if args.op == "mu":
        return mb.mu_of(B, args.green_weights).to_dict()
    if args.op == "nu":
        return mb.nu_of(B, args.green_weights).to_dict()
    if args.op == "eval":
        z = _point(args.z)
        return {"value": complex(mb.eval(B, z)), "derivative": complex(mb.deriv(B, z))}
    raise ValidationError(args.op)


def cmd_measure(args):
    from . import measures

    if args.op == "distance":
        mu, nu = _load_any_measure(args.mu), _load_any_measure(args.nu)
        return {"weak_distance": measures.weak_distance(measures._as_disk(mu), measures._as_disk(nu))}
    mu = _load_circle_measure(args.mu)
    if args.op == "poisson":
        return {"poisson": measures.poisson_extension(mu, _point(args.z), rule="exact")}
    if args.op == "mass":
        return {"total_mass": mu.total_mass}
    raise ValidationError(args.op)


def _read_strip_csv(path):
    from .thickness import StripGraphDomain

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    h1 = np.array([float(r.get("h1") or 0.0) for r in rows])
    h2 = np.array([float(r.get("h2") or 0.0) for r in rows])
    return StripGraphDomain(x, h1, h2)


def _windows(text):
    from .thickness import DYADIC_WINDOWS

    if not text:
        return DYADIC_WINDOWS
    out = []
    for part in text.split(";"):
        a, b = (float(t) for t in part.split(","))
        out.append((a, b))
    return tuple(out)


def _read_circle_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["h"]) for r in rows])


def _thickness_strip(args):
    from .extremal import rw_criterion
    from .thickness import is_thick_strip, strip_fixture, strip_integral_verdict

    if args.fixture:
        U = strip_fixture(args.fixture)[0]
    elif args.csv:
        U = _read_strip_csv(args.csv)
    else:
        raise ValidationError("thickness strip needs --csv or --fixture")
    windows = _windows(args.windows)
    out = {}
    criteria = [("area", lambda: is_thick_strip(U, windows, k=args.k)),
                ("integral", lambda: strip_integral_verdict(U, windows))]
    if not args.no_rw:
        criteria.append(("rw", lambda: rw_criterion(U, windows, delta=args.delta)))
    for key, fn in criteria:
        v = fn()
        out[key] = {"verdict": v.verdict.value, "values": list(v.values), "tol": v.tol,
                    "windows": [list(w) for w in v.windows]}
    return out


def cmd_thickness(args):
    from .thickness import angular_derivative_radial, disk_thickness_integral, julia_check, power_oracle

    if args.action == "strip":
        return _thickness_strip(args)
    if args.action == "disk":
        if not args.h:
            raise ValidationError("thickness disk needs --h (CSV column h on uniform angles)")
        return {"integral": disk_thickness_integral(_read_circle_csv(args.h), args.p)}
    if args.action == "julia":
        name = args.map or "identity"
        oracle = power_oracle(int(name[2:])) if name.startswith("z^") else _map(name)
        if oracle is None:
            raise ValidationError("thickness julia needs a map")
        return {"julia": julia_check(oracle, args.zeta, args.M),
                "angular_derivative": angular_derivative_radial(oracle, args.zeta)}
    raise ValidationError(args.action)


def cmd_modulus(args):
    from .extremal import GridDomain, load_grid_domain, modulus

    if args.rectangle:
        w, h = (float(t) for t in args.rectangle.split(","))
        g = GridDomain.rectangle(w, h, args.delta)
    else:
        g = load_grid_domain(args.mask, args.marking, args.delta)
    r = modulus(g)
    return {"modulus": r.modulus, "iterations": r.iterations, "residual": r.residual, "cells": r.cells}


def cmd_wos(args):
    from .harmonic import wos_harmonic_measure

    omega = _domain(args.domain)
    parts = _parts(args.parts, omega)
    est = wos_harmonic_measure(omega, _point(args.w), parts, int(float(args.n)), args.seed)
    return {"labels": list(est.labels), "estimates": list(est.estimates), "sigmas": list(est.sigmas),
            "n_walks": est.n_walks, "seed": est.seed}


def cmd_clark(args):
    from .harmonic import clark_pushforward

    omega = _domain(args.domain)
    mu = _load_circle_measure(args.mu)
    oracle = _map(args.map)
    base = _point(args.base) if args.base else None
    r = clark_pushforward(omega, oracle, mu, int(float(args.n)), args.seed, base_point=base)
    return {"interior": r.interior.to_dict(), "boundary": r.boundary.to_dict() if r.boundary else "unavailable",
            "boundary_status": r.boundary_status, "total": r.total, "expected": r.expected, "sigma": r.sigma,
            "n_walks": r.n_walks, "seed": r.seed}


def cmd_components(args):
    from .components import RoundDisk, island_classify

    B = _load_blaschke(args.blaschke)
    V = RoundDisk.parse(args.V)
    rep = island_classify(B, V, args.res)
    features = [{"type": "Feature",
                 "geometry": {"type": "Polygon",
                              "coordinates": [[[z.real, z.imag] for z in np.append(c.boundary, c.boundary[:1])]]},
                 "properties": {"degree": c.degree, "touches_circle": c.touches_circle,
                                "interior_point": [c.interior_point.real, c.interior_point.imag],
                                "critical_points_inside": [{"re": p.real, "im": p.imag, "mult": m}
                                                           for p, m in c.critical_points_inside]}}
                for c in rep.per_component]
    return {"type": "FeatureCollection", "features": features,
            "report": {"simple_islands": rep.simple_islands,
                       "distance_to_critical_values": rep.distance_to_critical_values}}


def _experiment_params(args):
    params = serialization.load(args.params) if args.params else {}
    if args.ns:
        params["ns"] = [int(t) for t in args.ns.split(",")]
    if args.V:
        params["V"] = [float(t) for t in args.V.split(",")]
    if args.family:
        params["family"] = args.family
    if args.n_walks:
        params["n_walks"] = int(float(args.n_walks))
    return params


def cmd_experiment(args):
    from .experiments import run_experiment

    report = run_experiment(args.name, _experiment_params(args), args.seed)
    args._exit = 0 if report.passed else 1
    return report.to_json()


def cmd_plot(args):
    from .plotting import emit_plot

    return emit_plot(serialization.load(args.report), args.kind)


def build_parser():
    p = argparse.ArgumentParser(prog="innerlab", description="Numerics for inner functions and their components.")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--out", help="output file (default stdout)")
        q.add_argument("--seed", type=int, default=0)
        q.set_defaults(func=fn)
        return q

    q = add("blaschke", cmd_blaschke, "critical points, entropy, μ_B, ν_B, evaluation")
    q.add_argument("op", choices=["critical", "entropy", "mu", "nu", "eval"])
    q.add_argument("--file", required=True)
    q.add_argument("--z", default="0,0")
    q.add_argument("--quadrature", type=int, default=4096)
    q.add_argument("--green-weights", action="store_true")

    q = add("measure", cmd_measure, "weak distance, Poisson extension, mass")
    q.add_argument("op", choices=["distance", "poisson", "mass"])
    q.add_argument("--mu", required=True)
    q.add_argument("--nu")
    q.add_argument("--z", default="0,0")

    q = add("thickness", cmd_thickness, "thickness criteria: strip graphs, disk integral, Julia quotient")
    q.add_argument("action", choices=["strip", "disk", "julia"])
    q.add_argument("--csv", help="strip: CSV with columns x,h1,h2")
    q.add_argument("--fixture", choices=["inverse-square", "inverse"], help="strip: built-in fixture")
    q.add_argument("--windows", help="strip: x1,x2;x1,x2;... (default dyadic [8,16]..[64,128])")
    q.add_argument("--k", type=float, default=2.0)
    q.add_argument("--delta", type=float, default=0.01)
    q.add_argument("--no-rw", action="store_true", help="strip: skip the modulus criterion")
    q.add_argument("--h", help="disk: CSV with column h sampled at uniform angles")
    q.add_argument("--p", type=float, default=0.0, help="disk: contact angle")
    q.add_argument("--map", help="julia: z^d, identity, moebius:x,y or right-half-disk:p")
    q.add_argument("--zeta", type=float, default=0.0)
    q.add_argument("--M", type=float, default=1.0)

    q = add("modulus", cmd_modulus, "conformal modulus of a rasterized quadrilateral")
    q.add_argument("--mask")
    q.add_argument("--marking")
    q.add_argument("--rectangle", help="w,h")
    q.add_argument("--delta", type=float, default=0.01)

    q = add("wos", cmd_wos, "walk-on-spheres harmonic measure")
    q.add_argument("--domain", required=True, help=f"JSON file or one of {', '.join(NAMED_DOMAINS)}")
    q.add_argument("--w", required=True)
    q.add_argument("--parts", required=True, help="JSON file, circle-vs-rest, by-direction or arc:t0,t1")
    q.add_argument("--n", default="1e6")

    q = add("clark", cmd_clark, "composition operator on measures")
    q.add_argument("--domain", required=True)
    q.add_argument("--mu", required=True)
    q.add_argument("--map", help="identity, moebius:x,y, right-half-disk:p or none")
    q.add_argument("--base", help="φ(0) when no map is given")
    q.add_argument("--n", default="1e5")

    q = add("components", cmd_components, "preimage components of a round disk")
    q.add_argument("action", choices=["trace"])
    q.add_argument("--blaschke", required=True)
    q.add_argument("--V", required=True, help="cx,cy,r")
    q.add_argument("--res", type=int, default=1024)

    q = add("experiment", cmd_experiment, "run a named experiment")
    q.add_argument("name")
    q.add_argument("--params", help="JSON parameter file")
    q.add_argument("--ns")
    q.add_argument("--V")
    q.add_argument("--family")
    q.add_argument("--n-walks")

    q = add("plot", cmd_plot, "SVG plot of a report series")
    q.add_argument("--report", required=True)
    q.add_argument("--kind", required=True)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    args._exit = 0
    try:
        _emit(args, args.func(args))
    except (DomainError, ValidationError, NumericalError, OSError) as exc:
        print(f"innerlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return args._exit


if __name__ == "__main__":
    sys.exit(main())
