"""Preimage components B⁻¹(V) of round disks under finite Blaschke products.

With f = m_V ∘ B, where m_V(w) = (w - c)/r carries V onto 𝔻, the preimage is
{|f| < 1}. By the maximum principle every component is simply connected, so
each one is bounded by a single level curve |f| = 1, traced here by marching
squares. Every component contains a preimage of the center of V; those
preimages seed the tracing and flag components too small for the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LinearRing, Polygon
from skimage.measure import find_contours

from .errors import DomainError, NumericalError, ValidationError
from .mobius_blaschke import BlaschkeProduct, Moebius, compose_moebius, critical_points, green_disk, motivating_family

WINDING_TOL = 1e-3
MIN_POINTS = 64


@dataclass(frozen=True)
class RoundDisk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValidationError("disk radius must be positive")
        if not abs(self.center) + self.radius < 1.0:
            raise ValidationError("V must be compactly contained in the unit disk")

    def to_unit(self, w):
        """m_V(w) = (w - c)/r."""
        return (np.asarray(w) - self.center) / self.radius

    def contains(self, w):
        return np.abs(np.asarray(w) - self.center) < self.radius

    def distance_to(self, w):
        """Distance from w to the closed disk."""
        return np.maximum(np.abs(np.asarray(w) - self.center) - self.radius, 0.0)

    def boundary_gap(self, w):
        return np.abs(np.abs(np.asarray(w) - self.center) - self.radius)

    @classmethod
    def parse(cls, text):
        cx, cy, r = (float(t) for t in text.split(","))
        return cls(complex(cx, cy), r)


@dataclass(frozen=True)
class PreimageComponent:
    boundary: np.ndarray  # closed ccw polyline, first point not repeated
    interior_point: complex
    degree: int
    critical_points_inside: tuple = ()
    touches_circle: bool = False
    winding: float = field(default=math.nan, compare=False)

    @property
    def polygon(self):
        return Polygon(np.column_stack([self.boundary.real, self.boundary.imag]))

    @property
    def is_simple(self):
        return bool(LinearRing(np.column_stack([self.boundary.real, self.boundary.imag])).is_simple)

    @property
    def critical_multiplicity(self):
        return int(sum(m for _, m in self.critical_points_inside))

    def to_dict(self):
        return {
            "boundary": [[z.real, z.imag] for z in self.boundary],
            "interior_point": [self.interior_point.real, self.interior_point.imag],
            "degree": self.degree,
            "critical_points_inside": [{"re": c.real, "im": c.imag, "mult": m} for c, m in self.critical_points_inside],
            "touches_circle": self.touches_circle,
        }


def _level(B, V, z):
    """|m_V(B(z))| - 1 inside the disk, +1 outside it."""
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape)
    inside = np.abs(z) < 1.0
    out[inside] = np.abs(V.to_unit(B(z[inside]))) - 1.0
    return out


def _trace(B, V, center, half_width, res):
    xs = np.linspace(center.real - half_width, center.real + half_width, res + 1)
    ys = np.linspace(center.imag - half_width, center.imag + half_width, res + 1)
    X, Y = np.meshgrid(xs, ys)
    g = _level(B, V, X + 1j * Y)
    step = xs[1] - xs[0]
    curves = []
    for c in find_contours(g, 0.0):
        if len(c) < 4 or np.any(c[0] != c[-1]):
            continue  # open curves leave the window
        z = (xs[0] + c[:-1, 1] * step) + 1j * (ys[0] + c[:-1, 0] * step)
        curves.append(z)
    return curves, step


def _ccw(z):
    area = 0.5 * np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag)
    return z if area > 0 else z[::-1]


def winding_number(B, V, boundary, max_turn=math.pi / 8, max_refine=12):
    """Winding number of m_V ∘ B along a closed polyline, refining until each step turns < max_turn."""
    z = np.asarray(boundary, dtype=complex)
    f = V.to_unit(B(z))
    for _ in range(max_refine):
        turn = np.angle(np.roll(f, -1) / f)
        bad = np.abs(turn) >= max_turn
        if not bad.any():
            break
        mids = 0.5 * (z[bad] + np.roll(z, -1)[bad])
        order = np.concatenate([np.arange(z.size), np.flatnonzero(bad) + 0.5])
        z = np.concatenate([z, mids])[np.argsort(order, kind="stable")]
        f = V.to_unit(B(z))
    if np.any(np.abs(f) < 1e-12):
        raise NumericalError("m_V ∘ B vanishes on the traced boundary")
    return float(np.sum(np.angle(np.roll(f, -1) / f)) / (2.0 * math.pi))


def _check_margin(B, V, grid_res, crit):
    if not crit:
        return
    values = np.array([complex(B(c)) for c, _ in crit])
    gap = V.boundary_gap(values)
    margin = 2.0 / grid_res
    if np.any(gap < margin):
        worst = values[int(np.argmin(gap))]
        raise DomainError(
            f"∂V passes within {gap.min():.3g} of the critical value {worst:.6g} "
            f"(margin {margin:.3g} required); perturb the radius of V"
        )


def _seeds(B, V):
    """B⁻¹(center of V) with multiplicities."""
    pre = compose_moebius(Moebius(V.center), B)
    return list(pre.zeros)


def _zoom(B, V, seed, half, grid_res):
    """Trace around ``seed``, doubling the window until a closed curve surrounds it."""
    point = shapely.Point(seed.real, seed.imag)
    while half <= 2.0:
        local, step = _trace(B, V, seed, half, grid_res)
        for z in local:
            p = Polygon(np.column_stack([z.real, z.imag]))
            if p.is_valid and p.contains(point):
                return _ccw(z), step, p
        half *= 2.0
    return None


def preimage_components(B: BlaschkeProduct, V: RoundDisk, grid_res: int = 512) -> list:
    """Components of B⁻¹(V), each with traced boundary, seed, degree and critical points."""
    if grid_res < 512:
        raise ValidationError("grid_res must be at least 512")
    crit = critical_points(B) if B.degree >= 2 else []
    _check_margin(B, V, grid_res, crit)
    seeds = _seeds(B, V)
    curves, step = _trace(B, V, 0j, 1.0, grid_res)
    curves = [_ccw(z) for z in curves]
    steps = [step] * len(curves)
    polys = [Polygon(np.column_stack([z.real, z.imag])) for z in curves]
    found = {}
    for seed, mult in seeds:
        point = shapely.Point(seed.real, seed.imag)
        owner = next((k for k, p in enumerate(polys) if p.contains(point)), None)
        if owner is not None and len(curves[owner]) < MIN_POINTS:
            # Too coarse on the global grid: retrace in a window fitted to the curve.
            x0, y0, x1, y1 = polys[owner].bounds
            zoomed = _zoom(B, V, seed, max(x1 - x0, y1 - y0), grid_res)
            if zoomed is not None:
                curves[owner], steps[owner], polys[owner] = zoomed
        elif owner is None:
            zoomed = _zoom(B, V, seed, 8.0 / grid_res, grid_res)
            if zoomed is None:
                raise NumericalError(f"could not trace the component around {seed}")
            curves.append(zoomed[0])
            steps.append(zoomed[1])
            polys.append(zoomed[2])
            owner = len(polys) - 1
        found.setdefault(owner, []).append((seed, mult))
    components = []
    for k in sorted(found):
        raw = curves[k]
        winding = winding_number(B, V, raw)
        degree = int(round(winding))
        if abs(winding - degree) > WINDING_TOL or degree < 1:
            raise NumericalError(f"non-integer winding {winding:.6g} on a traced boundary")
        seed_count = sum(m for _, m in found[k])
        if seed_count != degree:
            raise NumericalError(f"argument principle mismatch: winding {degree}, {seed_count} preimages")
        poly = polys[k]
        inside = tuple((c, m) for c, m in crit if poly.contains(shapely.Point(c.real, c.imag)))
        # Simplify at half the spacing of the grid the curve was traced on (1/grid_res globally).
        simplified = poly.simplify(steps[k] / 2.0, preserve_topology=True).exterior.coords
        boundary = np.array([complex(x, y) for x, y in simplified[:-1]])
        boundary = _ccw(boundary)
        touches = bool(np.max(np.abs(raw)) >= 1.0 - 2.0 * steps[k])
        components.append(PreimageComponent(boundary, complex(found[k][0][0]), degree, inside, touches, winding))
    return components


def degree(B: BlaschkeProduct, comp: PreimageComponent, V: RoundDisk) -> int:
    """Winding number of m_V ∘ B around the component boundary."""
    w = winding_number(B, V, comp.boundary)
    d = int(round(w))
    if abs(w - d) > WINDING_TOL:
        raise NumericalError(f"non-integer winding {w:.6g}; tracing failed")
    return d


@dataclass(frozen=True)
class IslandReport:
    simple_islands: bool
    distance_to_critical_values: float
    per_component: tuple

    def to_dict(self):
        return {
            "simple_islands": self.simple_islands,
            "distance_to_critical_values": self.distance_to_critical_values,
            "per_component": [
                {"degree": c.degree, "touches_circle": c.touches_circle,
                 "interior_point": [c.interior_point.real, c.interior_point.imag],
                 "critical_multiplicity": c.critical_multiplicity}
                for c in self.per_component
            ],
        }


def island_classify(B: BlaschkeProduct, V: RoundDisk, grid_res: int = 512) -> IslandReport:
    """Whether B⁻¹(V) consists of simple islands, with dist(V, supp ν_B)."""
    from .mobius_blaschke import nu_of

    comps = preimage_components(B, V, grid_res)
    if B.degree >= 2:
        support = nu_of(B).points
        dist = float(np.min(V.distance_to(support))) if support.size else math.inf
    else:
        dist = math.inf
    simple = all(c.degree == 1 and not c.touches_circle for c in comps)
    return IslandReport(simple, dist, tuple(comps))


FAMILIES = {"motivating": motivating_family}


def escaping_green_sum(family, n: int, V: RoundDisk, p=0j, split_radius: float = 0.5) -> float:
    """Σ mult · G_𝔻(p, c) over critical points c of F_n with |c| > split_radius and F_n(c) ∈ V."""
    if not 0.0 < split_radius < 1.0:
        raise ValidationError("split_radius must lie in (0, 1)")
    make = FAMILIES[family] if isinstance(family, str) else family
    F = make(int(n))
    total = 0.0
    for c, m in critical_points(F):
        if abs(c) > split_radius and bool(V.contains(complex(F(c)))):
            total += m * green_disk(p, c)
    return total
