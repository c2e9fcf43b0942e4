"""Measures on the circle and the closed disk.

Circle measures are normalized against dm = dθ/2π: an atom of mass m has
P_m(0) contribution m, and a density value v on one of N uniform cells
carries mass v/N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DomainError, ValidationError

TWO_PI = 2.0 * math.pi
MERGE_TOL = 1e-12


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def harmonic_measure_of_arc(z, a, b):
    """Harmonic measure from z ∈ 𝔻 of the ccw arc from angle a to angle b (b ≥ a)."""
    z = np.asarray(z, dtype=complex)
    ea, eb = np.exp(1j * a), np.exp(1j * b)
    # The ccw angle subtended at z lies in ((b-a)/2, π + (b-a)/2), inside (0, 2π).
    subtended = np.mod(np.angle((eb - z) / (ea - z)), TWO_PI)
    return np.where(np.asarray(b) - np.asarray(a) >= TWO_PI, 1.0, subtended / math.pi - (b - a) / TWO_PI)


@dataclass(frozen=True)
class CircleMeasure:
    """Atoms (theta, mass) plus a piecewise-constant density on N uniform cells."""

    atoms: tuple = ()
    density: tuple = ()

    def __post_init__(self):
        atoms = []
        for theta, mass in self.atoms:
            mass = float(mass)
            if not mass > 0 or not math.isfinite(mass):
                raise ValidationError(f"atom masses must be positive and finite, got {mass}")
            atoms.append((float(_wrap(float(theta))), mass))
        atoms.sort()
        density = tuple(float(v) for v in self.density)
        if any(v < 0 or not math.isfinite(v) for v in density):
            raise ValidationError("density values must be finite and nonnegative")
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "density", density)

    @classmethod
    def lebesgue(cls, mass=1.0, cells=1):
        return cls(density=(float(mass),) * cells)

    @classmethod
    def dirac(cls, theta, mass=1.0):
        return cls(atoms=((theta, mass),))

    @property
    def cells(self):
        return len(self.density)

    @property
    def atom_thetas(self):
        return np.array([t for t, _ in self.atoms])

    @property
    def atom_masses(self):
        return np.array([m for _, m in self.atoms])

    @property
    def atom_mass(self):
        return float(sum(m for _, m in self.atoms))

    @property
    def density_mass(self):
        return float(sum(self.density) / self.cells) if self.cells else 0.0

    @property
    def total_mass(self):
        return self.atom_mass + self.density_mass

    def scaled(self, factor):
        return CircleMeasure(
            tuple((t, factor * m) for t, m in self.atoms), tuple(factor * v for v in self.density)
        )

    def _density_cdf(self, theta):
        """Density mass of [0, theta] for theta in [0, 2π]."""
        n = self.cells
        if n == 0:
            return np.zeros_like(np.asarray(theta, dtype=float))
        values = np.asarray(self.density)
        cumulative = np.concatenate([[0.0], np.cumsum(values)]) / n
        pos = np.asarray(theta, dtype=float) / TWO_PI * n
        k = np.clip(np.floor(pos).astype(int), 0, n - 1)
        return cumulative[k] + (pos - k) * values[k] / n

    def arc_mass(self, start, length, closed=False):
        """Mass of the ccw arc from ``start`` of angular ``length`` (radians).

        The arc is open unless ``closed``; length ≥ 2π means the whole circle.
        """
        if length >= TWO_PI:
            return self.total_mass
        if length <= 0:
            if closed and self.atoms:
                gaps = np.abs(np.angle(np.exp(1j * (self.atom_thetas - start))))
                return float(self.atom_masses[gaps <= MERGE_TOL].sum())
            return 0.0
        a = float(_wrap(start))
        b = a + length
        if b <= TWO_PI:
            dens = float(self._density_cdf(b) - self._density_cdf(a))
        else:
            dens = float(self.density_mass - self._density_cdf(a) + self._density_cdf(b - TWO_PI))
        atom = 0.0
        if self.atoms:
            offset = _wrap(self.atom_thetas - a)
            offset = np.where(offset > TWO_PI - MERGE_TOL, 0.0, offset)
            if closed:
                hit = (offset <= length + MERGE_TOL)
            else:
                hit = (offset > MERGE_TOL) & (offset < length - MERGE_TOL)
            atom = float(self.atom_masses[hit].sum())
        return atom + dens

    def centered_arc_mass(self, x, eps, closed=False):
        """μ(I(x, ε)) for the arc of half-width ε around angle x."""
        return self.arc_mass(x - eps, 2.0 * eps, closed=closed)

    def to_disk(self):
        """The atomic part as a DiskMeasure (densities are not representable there)."""
        return DiskMeasure(tuple((complex(np.exp(1j * t)), m) for t, m in self.atoms))

    def to_dict(self):
        return {
            "atoms": [{"theta": t, "mass": m} for t, m in self.atoms],
            "density": {"cells": self.cells, "values": list(self.density)},
        }

    @classmethod
    def from_dict(cls, data):
        atoms = tuple((a["theta"], a["mass"]) for a in data.get("atoms", []))
        dens = data.get("density") or {"cells": 0, "values": []}
        values = tuple(dens.get("values", []))
        if len(values) != int(dens.get("cells", len(values))):
            raise ValidationError("density cell count does not match the value list")
        return cls(atoms, values)


@dataclass(frozen=True)
class DiskMeasure:
    """Finitely many atoms (z, mass) in the closed disk."""

    atoms: tuple = ()

    def __post_init__(self):
        atoms = []
        for z, mass in self.atoms:
            z = complex(z)
            mass = float(mass)
            if abs(z) > 1.0 + 1e-9:
                raise ValidationError(f"disk atom outside the closed disk: {z}")
            if not mass > 0 or not math.isfinite(mass):
                raise ValidationError(f"atom masses must be positive and finite, got {mass}")
            atoms.append((z, mass))
        object.__setattr__(self, "atoms", tuple(atoms))

    @classmethod
    def dirac(cls, z, mass=1.0):
        return cls(((z, mass),))

    @property
    def points(self):
        return np.array([z for z, _ in self.atoms], dtype=complex)

    @property
    def masses(self):
        return np.array([m for _, m in self.atoms])

    @property
    def total_mass(self):
        return float(sum(m for _, m in self.atoms))

    def merged(self, tol=MERGE_TOL):
        """Combine atoms closer than ``tol``, in input order."""
        out: list = []
        for z, m in self.atoms:
            for k, (w, mw) in enumerate(out):
                if abs(z - w) <= tol:
                    out[k] = (w, mw + m)
                    break
            else:
                out.append((z, m))
        return DiskMeasure(tuple(out))

    def to_dict(self):
        return {"atoms": [{"re": z.real, "im": z.imag, "mass": m} for z, m in self.atoms]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple((complex(a["re"], a["im"]), a["mass"]) for a in data.get("atoms", [])))


def poisson_kernel(zeta, z):
    """(1 - |z|²) / |ζ - z|²."""
    return (1.0 - np.abs(z) ** 2) / np.abs(zeta - z) ** 2


def poisson_extension(mu: CircleMeasure, z, rule="midpoint") -> float:
    """P_μ(z) = ∫ (1-|z|²)/|ζ-z|² dμ(ζ).

    ``rule="midpoint"`` samples the kernel at cell midpoints; ``rule="exact"``
    integrates the piecewise-constant density against the kernel in closed
    form (harmonic measure of each cell).
    """
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError("the Poisson extension needs |z| < 1")
    value = 0.0
    if mu.atoms:
        zeta = np.exp(1j * mu.atom_thetas)
        value += float(np.sum(mu.atom_masses * poisson_kernel(zeta, z)))
    n = mu.cells
    if n:
        values = np.asarray(mu.density)
        if rule == "midpoint":
            mids = np.exp(1j * TWO_PI * (np.arange(n) + 0.5) / n)
            value += float(np.sum(values * poisson_kernel(mids, z)) / n)
        elif rule == "exact":
            if n == 1:
                value += values[0]
            else:
                edges = TWO_PI * np.arange(n + 1) / n
                omega = harmonic_measure_of_arc(z, edges[:-1], edges[1:])
                value += float(np.sum(values * omega))
        else:
            raise DomainError(f"unknown quadrature rule {rule!r}")
    return value


def _transport_cost(p, pw, q, qw):
    """W1 between discrete probability vectors with Euclidean ground cost."""
    if p.size == 1:
        return float(np.sum(qw * np.abs(q - p[0])))
    if q.size == 1:
        return float(np.sum(pw * np.abs(p - q[0])))
    n, m = p.size, q.size
    cost = np.abs(p[:, None] - q[None, :]).ravel()
    rows = np.repeat(np.arange(n), m)
    cols = np.tile(np.arange(m), n)
    from scipy.sparse import coo_matrix, vstack

    a_rows = coo_matrix((np.ones(n * m), (rows, np.arange(n * m))), shape=(n, n * m))
    a_cols = coo_matrix((np.ones(n * m), (cols, np.arange(n * m))), shape=(m, n * m))
    # One marginal constraint is redundant; drop it for a well-posed LP.
    a_eq = vstack([a_rows, a_cols.tocsr()[:-1]]).tocsr()
    b_eq = np.concatenate([pw, qw[:-1]])
    result = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if result.status != 0:
        raise DomainError(f"transport LP failed: {result.message}")
    return float(result.fun)


def weak_distance(mu: DiskMeasure, nu: DiskMeasure) -> float:
    """W1 between the normalized measures plus |μ(𝔻̄) − ν(𝔻̄)|."""
    mu, nu = _as_disk(mu), _as_disk(nu)
    if not mu.atoms or not nu.atoms:
        raise DomainError("weak_distance needs nonempty measures")
    if len(mu.atoms) > 10_000 or len(nu.atoms) > 10_000:
        raise DomainError("weak_distance supports at most 10^4 atoms per measure")
    mu, nu = mu.merged(), nu.merged()
    if _order_key(nu) < _order_key(mu):
        mu, nu = nu, mu  # fixed argument order makes the LP answer exactly symmetric
    gap = abs(mu.total_mass - nu.total_mass)
    transport = _transport_cost(
        mu.points, mu.masses / mu.total_mass, nu.points, nu.masses / nu.total_mass
    )
    return max(transport, 0.0) + gap


def _order_key(m):
    return sorted((z.real, z.imag, w) for z, w in m.atoms)


def _as_disk(measure):
    if isinstance(measure, CircleMeasure):
        if measure.cells:
            raise DomainError("weak_distance is defined for atomic measures only")
        return measure.to_disk()
    return measure


@dataclass(frozen=True)
class BeurlingCarlesonSet:
    """A closed null set E given by its complementary open arcs (t0, t1), ccw."""

    complement_arcs: tuple

    def __post_init__(self):
        arcs = tuple((float(t0), float(t1)) for t0, t1 in self.complement_arcs)
        if not arcs:
            raise ValidationError("at least one complementary arc is required")
        object.__setattr__(self, "complement_arcs", arcs)
        lengths = self.lengths
        if np.any(lengths <= 0) or np.any(lengths > 1.0 + 1e-12):
            raise ValidationError("each normalized arc length must lie in (0, 1]")
        if abs(lengths.sum() - 1.0) > 1e-9:
            raise ValidationError(
                f"complementary arcs must have total normalized length 1, got {lengths.sum():.12g}"
            )
        starts = _wrap(np.array([a for a, _ in arcs]))
        order = np.argsort(starts)
        ends = starts[order] + TWO_PI * lengths[order]
        nxt = np.roll(starts[order], -1)
        nxt[-1] += TWO_PI
        if len(arcs) > 1 and np.any(ends > nxt + 1e-9):
            raise ValidationError("complementary arcs overlap")

    @classmethod
    def from_points(cls, thetas):
        """E = a finite set of points; the complement arcs join consecutive points."""
        t = np.sort(_wrap(np.asarray(thetas, dtype=float)))
        if t.size == 1:
            return cls(((t[0], t[0]),))
        return cls(tuple((t[k], t[(k + 1) % t.size]) for k in range(t.size)))

    @property
    def lengths(self):
        out = []
        for t0, t1 in self.complement_arcs:
            span = float(_wrap(t1 - t0))
            out.append(1.0 if span == 0.0 else span / TWO_PI)
        return np.array(out)

    @property
    def endpoints(self):
        pts = _wrap(np.array([t for arc in self.complement_arcs for t in arc]))
        return np.unique(pts)

    def to_dict(self):
        return {"complement_arcs": [[t0, t1] for t0, t1 in self.complement_arcs]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(tuple(a) for a in data["complement_arcs"]))


def bc_entropy(E: BeurlingCarlesonSet) -> float:
    """Σ |I_k| log(1/|I_k|) over the complementary arcs."""
    lengths = E.lengths
    return float(np.sum(-lengths * np.log(lengths)))


def chordal_distance(theta, phi):
    return 2.0 * np.abs(np.sin((np.asarray(theta) - np.asarray(phi)) / 2.0))


def distance_to_set(E: BeurlingCarlesonSet, theta):
    theta = np.asarray(theta, dtype=float)
    pts = E.endpoints
    return np.min(chordal_distance(theta[..., None], pts), axis=-1)


def auxiliary_measure(E: BeurlingCarlesonSet, grid_n: int = 1024) -> CircleMeasure:
    """log⁺(1/d(ζ, E)) dm sampled at cell midpoints, d chordal."""
    if grid_n < 256:
        raise DomainError("auxiliary_measure needs grid_n >= 256")
    mids = TWO_PI * (np.arange(grid_n) + 0.5) / grid_n
    d = distance_to_set(E, mids)
    return CircleMeasure(density=tuple(np.maximum(np.log(1.0 / d), 0.0)))


def maximal_ratio(mu: CircleMeasure, nu: CircleMeasure, x, eps_min, eps_max=1.0,
                  ladder=4, offsets=16) -> float:
    """min μ(I)/ν(I) over closed arcs I ∋ x with eps_min ≤ |I| ≤ eps_max.

    |I| is the normalized length. Lengths run over the nested geometric ladder
    eps_max·2^{-j/ladder} (so shrinking eps_min only adds arcs) and positions
    over ``offsets + 1`` placements of x inside the arc, endpoints included.
    Arcs with ν(I) = 0 are skipped.
    """
    if not eps_min > 0 or eps_max < eps_min or eps_max > 1.0:
        raise DomainError("need 0 < eps_min <= eps_max <= 1")
    j_max = int(math.floor(ladder * math.log2(eps_max / eps_min) + 1e-9))
    lengths = eps_max * 2.0 ** (-np.arange(j_max + 1) / ladder)
    best = math.inf
    for length in lengths:
        span = TWO_PI * length
        for s in np.linspace(0.0, 1.0, offsets + 1):
            start = x - s * span
            denom = nu.arc_mass(start, span, closed=True)
            if denom <= 0.0:
                continue
            best = min(best, mu.arc_mass(start, span, closed=True) / denom)
    if best == math.inf:
        raise DomainError("ν vanishes on every candidate arc")
    return best


def _atom_breakpoints(mu: CircleMeasure, x, lo, hi):
    if not mu.atoms:
        return np.empty(0)
    d = np.abs(np.angle(np.exp(1j * (mu.atom_thetas - x))))
    return np.unique(d[(d > lo) & (d < hi)])


def local_integral(mu: CircleMeasure, x, eps_grid: int = 200, eps_min: float = 1e-6,
                   eps_max: float = 1.0) -> float:
    """∫_0^{eps_max} dε / μ(I(x, ε)), truncated below at eps_min.

    [0, eps_min] contributes eps_min/μ(x, eps_min). Above, the integrand is
    piecewise smooth between atom distances; each piece is split on a
    log-spaced grid and integrated by Gauss-Legendre in log ε. Returns +inf as
    soon as μ(x, ε) vanishes at a node.
    """
    if eps_grid < 100:
        raise DomainError("eps_grid must be at least 100")
    head_mass = mu.centered_arc_mass(x, eps_min)
    if head_mass <= 0.0:
        return math.inf
    breaks = np.unique(np.concatenate([
        np.geomspace(eps_min, eps_max, eps_grid),
        _atom_breakpoints(mu, x, eps_min, eps_max),
    ]))
    nodes, weights = np.polynomial.legendre.leggauss(4)
    total = eps_min / head_mass
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        a, b = math.log(lo), math.log(hi)
        eps = np.exp(0.5 * (b - a) * nodes + 0.5 * (a + b))
        masses = np.array([mu.centered_arc_mass(x, e) for e in eps])
        if np.any(masses <= 0.0):
            return math.inf
        total += 0.5 * (b - a) * float(np.sum(weights * eps / masses))
    return total


def cumulative_dominates(mu: CircleMeasure, nu: CircleMeasure, x, eps_grid: int = 200,
                         slack: float = 1e-12) -> bool:
    """True iff μ(I(x, ε)) ≥ ν(I(x, ε)) at every sampled ε ∈ (0, π]."""
    if eps_grid < 100:
        raise DomainError("eps_grid must be at least 100")
    tiny = 1e-12
    base = np.geomspace(1e-9, math.pi, eps_grid)
    kinks = np.concatenate([_atom_breakpoints(mu, x, 0.0, math.pi),
                            _atom_breakpoints(nu, x, 0.0, math.pi)])
    samples = np.concatenate([base, kinks * (1 + 1e-9), kinks * (1 - 1e-9), [tiny, math.pi]])
    samples = np.sort(samples[(samples > 0) & (samples <= math.pi)])
    samples = np.concatenate([samples, 0.5 * (samples[:-1] + samples[1:])])
    for eps in samples:
        if mu.centered_arc_mass(x, eps) < nu.centered_arc_mass(x, eps) - slack:
            return False
    return True


def pushforward_radial(F, mu, radial_r: float = 1.0 - 1e-8) -> DiskMeasure:
    """Move each atom (z, m) to F(z) (or F(r z) for |z| = 1), keeping masses."""
    from .mobius_blaschke import eval as eval_inner

    if not 0.0 < radial_r < 1.0:
        raise DomainError("radial_r must lie in (0, 1)")
    if isinstance(mu, CircleMeasure):
        if mu.cells:
            raise DomainError("pushforward_radial acts on atomic measures")
        mu = mu.to_disk()
    atoms = []
    for z, m in mu.atoms:
        point = z if abs(z) < 1.0 - 1e-15 else radial_r * z
        atoms.append((complex(eval_inner(F, point)), m))
    return DiskMeasure(tuple(atoms))
