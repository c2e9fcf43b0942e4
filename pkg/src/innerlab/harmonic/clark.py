"""Pushforward of circle measures under composition with a Riemann map.

For φ: 𝔻 → Ω with ψ = φ⁻¹, the measure ν with P_ν = P_μ ∘ φ splits into
  - on ∂Ω ∩ 𝔻: P_μ(z) dω_{Ω,φ(0)}(z), sampled by walk on spheres;
  - on ∂Ω ∩ ∂𝔻: |ψ′(x)| dμ(x), from the map oracle.
Its total mass is P_μ(φ(0)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..measures import TWO_PI, CircleMeasure, DiskMeasure, harmonic_measure_of_arc, poisson_extension, poisson_kernel
from ..thickness import MapOracle, angular_derivative_radial
from .domains import PolylineJordanDomain
from .wos import run_walks

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)
_CHUNK = 65536


@dataclass(frozen=True)
class ClarkResult:
    interior: DiskMeasure
    boundary: Optional[CircleMeasure]
    boundary_status: str  # "exact", "radial" or "unavailable"
    total: float
    expected: float
    sigma: float
    n_walks: int
    seed: int

    @property
    def within_3_sigma(self):
        return abs(self.total - self.expected) <= 3.0 * self.sigma + 1e-12 * max(1.0, abs(self.expected))


def poisson_extension_many(mu: CircleMeasure, z):
    """P_μ at an array of interior points (exact cell rule for the density)."""
    z = np.asarray(z, dtype=complex).ravel()
    out = np.zeros(z.size)
    thetas, masses = mu.atom_thetas, mu.atom_masses
    n = mu.cells
    edges = TWO_PI * np.arange(n + 1) / n if n > 1 else None
    values = np.asarray(mu.density)
    for lo in range(0, z.size, _CHUNK):
        zc = z[lo:lo + _CHUNK]
        if masses.size:
            out[lo:lo + _CHUNK] += poisson_kernel(np.exp(1j * thetas)[None, :], zc[:, None]) @ masses
        if n == 1:
            out[lo:lo + _CHUNK] += values[0]
        elif n > 1:
            omega = harmonic_measure_of_arc(zc[:, None], edges[None, :-1], edges[None, 1:])
            out[lo:lo + _CHUNK] += omega @ values
    return out


def _boundary_weights(omega, oracle, thetas):
    """|ψ′(e^{iθ})| at each angle (0 off ∂Ω ∩ ∂𝔻), and whether any used the radial limit."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.zeros(thetas.size)
    touching = np.atleast_1d(omega.touches_circle_at(thetas))
    on_arc = np.atleast_1d(omega.on_circle_part(thetas))
    radial = False
    exact = touching & on_arc if oracle.derivative is not None else np.zeros(thetas.size, dtype=bool)
    if exact.any():
        value = np.abs(np.asarray(oracle.derivative(np.exp(1j * thetas[exact])), dtype=complex))
        if not np.all(np.isfinite(value)):
            raise DomainError(f"{oracle.name}: derivative undefined on part of ∂Ω ∩ ∂𝔻")
        out[exact] = value
    for k in np.flatnonzero(touching & ~exact):
        radial = True
        value = angular_derivative_radial(oracle, float(thetas[k]))
        # A thin contact point carries no boundary mass.
        out[k] = 0.0 if math.isinf(value) else value
    return out, radial


def _pushforward_boundary(omega, oracle, mu: CircleMeasure, sub_cells=256):
    radial = False
    atoms = []
    if mu.atoms:
        weights, radial = _boundary_weights(omega, oracle, mu.atom_thetas)
        atoms = [(t, m * w) for t, m, w in zip(mu.atom_thetas, mu.atom_masses, weights) if w > 0.0]
    density = ()
    n = mu.cells
    if n:
        # Average |ψ′| over each cell: split it into pieces, 8-point Gauss-Legendre on each.
        pieces = max(1, math.ceil(sub_cells / n))
        edges = TWO_PI * np.arange(n * pieces + 1) / (n * pieces)
        a, b = edges[:-1, None], edges[1:, None]
        nodes = (0.5 * (a + b) + 0.5 * (b - a) * _GAUSS_X[None, :]).ravel()
        values = np.asarray(mu.density)
        active = np.repeat(values > 0, pieces * _GAUSS_X.size)
        w = np.zeros(nodes.size)
        if active.any():
            w[active], used = _boundary_weights(omega, oracle, nodes[active])
            radial = radial or used
        mean = (w.reshape(n, pieces, -1) @ _GAUSS_W).sum(axis=1) / (2.0 * pieces)
        density = tuple((values * mean).tolist())
    return CircleMeasure(tuple(atoms), density), ("radial" if radial else "exact")


def clark_pushforward(omega: PolylineJordanDomain, map_inverse: Optional[MapOracle], mu: CircleMeasure,
                      n_walks=100_000, seed=0, base_point=None, **walk_kwargs) -> ClarkResult:
    """Composition operator on measures for the Riemann map φ = ψ⁻¹ onto Ω.

    ``map_inverse`` is ψ; its ``base_point`` is φ(0). Without an oracle the
    boundary part is reported as unavailable and ``base_point`` is required.
    """
    if base_point is None:
        if map_inverse is None:
            raise DomainError("need a map oracle or an explicit base point φ(0)")
        base_point = map_inverse.base_point
    w = omega.check_interior(base_point, "φ(0)")
    expected = poisson_extension(mu, w, rule="exact")

    interior_segments = ~omega.circle_segments
    interior = DiskMeasure()
    sigma = 0.0
    interior_total = 0.0
    walks = 0
    if interior_segments.any():
        result = run_walks(omega, w, n_walks, seed, **walk_kwargs)
        walks = result.n_walks
        exits = result.exits
        # Exits never leave the closed disk; pull the rare endpoint exits just inside.
        radius = np.abs(exits)
        exits = np.where(radius >= 1.0 - 1e-12, exits / np.maximum(radius, 1e-300) * (1.0 - 1e-12), exits)
        keep = interior_segments[result.segments]
        values = np.zeros(walks)
        values[keep] = poisson_extension_many(mu, exits[keep])
        interior_total = float(values.mean())
        sigma = float(values.std(ddof=1) / math.sqrt(walks)) if walks > 1 else math.inf
        seg = result.segments[keep]
        vals = values[keep]
        mass = np.bincount(seg, weights=vals, minlength=omega.n_segments)
        centroid = np.bincount(seg, weights=vals * exits[keep].real, minlength=omega.n_segments) + 1j * np.bincount(
            seg, weights=vals * exits[keep].imag, minlength=omega.n_segments)
        atoms = [(centroid[k] / mass[k], mass[k] / walks) for k in np.flatnonzero(mass > 0)]
        interior = DiskMeasure(tuple(atoms))

    if map_inverse is None:
        boundary, status = None, "unavailable"
        total = interior_total
    else:
        boundary, status = _pushforward_boundary(omega, map_inverse, mu)
        total = interior_total + boundary.total_mass
    return ClarkResult(interior, boundary, status, total, expected, sigma, walks, int(seed))
