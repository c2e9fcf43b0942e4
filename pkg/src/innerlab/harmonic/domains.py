"""Polygonal Jordan domains and boundary partitions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import LinearRing, Polygon

from ..errors import DomainError, ValidationError

CIRCLE_VERTEX_TOL = 1e-9


@dataclass(frozen=True)
class PolylineJordanDomain:
    """A simple positively oriented closed polyline; vertex k joins vertex k+1.

    A segment whose two endpoints lie on the unit circle (within 1e-9) and
    which is short compared to the circle is recorded as a discretized circle
    arc: it stands for the arc between its endpoint angles.
    """

    vertices: np.ndarray
    contained_in_disk: bool = True
    name: str = "domain"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        if v.ndim != 1 or v.size < 3:
            raise ValidationError("a polyline domain needs at least three vertices")
        if abs(v[0] - v[-1]) < 1e-15:
            v = v[:-1]
        ring = LinearRing(np.column_stack([v.real, v.imag]))
        if not ring.is_simple:
            raise ValidationError("boundary polyline is not simple")
        if not ring.is_ccw:
            raise ValidationError("boundary polyline must be positively oriented")
        if self.contained_in_disk and np.any(np.abs(v) > 1.0 + CIRCLE_VERTEX_TOL):
            raise ValidationError("a vertex lies outside the closed unit disk")
        object.__setattr__(self, "vertices", v)

    @property
    def n_segments(self):
        return self.vertices.size

    @property
    def starts(self):
        return self.vertices

    @property
    def ends(self):
        return np.roll(self.vertices, -1)

    @property
    def polygon(self):
        return Polygon(np.column_stack([self.vertices.real, self.vertices.imag]))

    @property
    def diameter(self):
        """Diagonal of the bounding box (within √2 of the true diameter)."""
        v = self.vertices
        return float(math.hypot(np.ptp(v.real), np.ptp(v.imag)))

    @property
    def circle_segments(self):
        """Boolean mask of segments that discretize an arc of the unit circle."""
        a, b = self.starts, self.ends
        on = (np.abs(np.abs(a) - 1.0) <= CIRCLE_VERTEX_TOL) & (np.abs(np.abs(b) - 1.0) <= CIRCLE_VERTEX_TOL)
        short = np.abs(b - a) < 0.5
        return on & short

    def circle_arc_intervals(self):
        """Angular intervals (t0, t1), ccw, covered by the circle segments."""
        k = np.flatnonzero(self.circle_segments)
        a, b = self.starts[k], self.ends[k]
        t0 = np.arctan2(a.imag, a.real)
        t1 = t0 + np.angle(b / a)
        return list(zip(np.minimum(t0, t1).tolist(), np.maximum(t0, t1).tolist()))

    @property
    def circle_vertices(self):
        return self.vertices[np.abs(np.abs(self.vertices) - 1.0) <= CIRCLE_VERTEX_TOL]

    def touches_circle_at(self, theta, tol=1e-9):
        """e^{iθ} is a boundary vertex on the circle or lies on a circle-arc segment."""
        theta = np.asarray(theta, dtype=float)
        zeta = np.exp(1j * theta)
        near_vertex = np.zeros(theta.shape, dtype=bool)
        if self.circle_vertices.size:
            near_vertex = np.min(np.abs(self.circle_vertices[None, :] - zeta.reshape(-1, 1)), axis=1).reshape(
                theta.shape) <= tol
        out = near_vertex | self.on_circle_part(theta)
        return bool(out) if out.ndim == 0 else out

    def on_circle_part(self, theta, tol=1e-12):
        """Whether the circle point e^{iθ} lies on a circle-arc segment."""
        theta = np.asarray(theta, dtype=float)
        intervals = np.asarray(self.circle_arc_intervals(), dtype=float).reshape(-1, 2)
        if intervals.size == 0:
            out = np.zeros(theta.shape, dtype=bool)
        else:
            offset = np.mod(theta.reshape(-1, 1) - intervals[None, :, 0], 2.0 * math.pi)
            hit = (offset <= (intervals[:, 1] - intervals[:, 0])[None, :] + tol) | (offset >= 2.0 * math.pi - tol)
            out = hit.any(axis=1).reshape(theta.shape)
        return bool(out) if out.ndim == 0 else out

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.contains_xy(self.polygon, z.real, z.imag)

    def distance_to_boundary(self, z):
        z = np.asarray(z, dtype=complex)
        pts = shapely.points(z.real, z.imag)
        return shapely.distance(self.polygon.exterior, pts)

    def check_interior(self, w, name="point"):
        w = complex(w)
        if not bool(self.contains(w)) or float(self.distance_to_boundary(w)) <= 0.0:
            raise DomainError(f"{name} {w} is not strictly inside {self.name}")
        return w

    def segment_midpoints(self):
        return 0.5 * (self.starts + self.ends)

    def transformed(self, a=1.0, b=0.0, name=None):
        """The image under z ↦ a z + b (a ≠ 0)."""
        return PolylineJordanDomain(a * self.vertices + b, self.contained_in_disk and abs(a) <= 1 and b == 0,
                                    name or self.name)

    def to_dict(self):
        return {"name": self.name, "vertices": [[z.real, z.imag] for z in self.vertices],
                "contained_in_disk": self.contained_in_disk}

    @classmethod
    def from_dict(cls, data):
        v = np.array([complex(x, y) for x, y in data["vertices"]])
        return cls(v, data.get("contained_in_disk", True), data.get("name", "domain"))


def _arc(t0, t1, n, radius=1.0):
    t = np.linspace(t0, t1, n + 1)
    return radius * np.exp(1j * t)


def disk_polygon(n=1000):
    return PolylineJordanDomain(np.exp(2j * np.pi * np.arange(n) / n), name=f"disk{n}")


def upper_half_disk(n_arc=500, n_diameter=200):
    arc = _arc(0.0, math.pi, n_arc)
    diameter = np.linspace(-1.0, 1.0, n_diameter + 1)[1:-1]
    return PolylineJordanDomain(np.concatenate([arc, diameter]), name="upper_half_disk")


def right_half_disk(n_arc=500, n_diameter=200):
    arc = _arc(-math.pi / 2, math.pi / 2, n_arc)
    diameter = 1j * np.linspace(1.0, -1.0, n_diameter + 1)[1:-1]
    return PolylineJordanDomain(np.concatenate([arc, diameter]), name="right_half_disk")


def square(side=1.0, center=0j, per_side=1):
    half = side / 2.0
    corners = [center + complex(-half, -half), center + complex(half, -half),
               center + complex(half, half), center + complex(-half, half)]
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        pts.extend(a + (b - a) * np.arange(per_side) / per_side)
    return PolylineJordanDomain(np.array(pts), contained_in_disk=abs(half) * math.sqrt(2) <= 1, name="square")


def radial_graph_domain(h, n=2000, name="radial_graph"):
    """{r e^{iθ} : r < 1 - h(θ)} for a profile 0 <= h < 1, vertices at n equal angles."""
    theta = 2.0 * np.pi * np.arange(n) / n
    r = 1.0 - np.asarray(h(theta), dtype=float)
    if np.any(r <= 0) or np.any(r > 1):
        raise ValidationError("radial profile must satisfy 0 <= h < 1")
    return PolylineJordanDomain(r * np.exp(1j * theta), name=name)


def cusp_domain(n=4000, cap=0.5):
    """Touches the circle only at 1, with boundary 1 - |ζ - 1| nearby (a right-angle corner)."""
    return radial_graph_domain(lambda t: np.minimum(2.0 * np.abs(np.sin(t / 2.0)), cap), n, "cusp")


@dataclass(frozen=True)
class BoundaryPartition:
    """Labels for parts of the boundary; segment k belongs to part segment_part[k]."""

    labels: tuple
    segment_part: np.ndarray

    def __post_init__(self):
        parts = np.asarray(self.segment_part, dtype=np.int64)
        if parts.min() < 0 or parts.max() >= len(self.labels):
            raise ValidationError("segment part index out of range")
        object.__setattr__(self, "segment_part", parts)
        object.__setattr__(self, "labels", tuple(self.labels))

    def check(self, omega: PolylineJordanDomain):
        if self.segment_part.size != omega.n_segments:
            raise ValidationError("partition does not cover every boundary segment")
        return self

    @classmethod
    def by_angle(cls, omega, t0, t1, labels=("arc", "rest")):
        """Part 0 holds segments whose midpoint angle lies in [t0, t1) (mod 2π)."""
        mids = omega.segment_midpoints()
        ang = np.mod(np.angle(mids) - t0, 2.0 * np.pi)
        return cls(labels, np.where(ang < (t1 - t0), 0, 1)).check(omega)

    @classmethod
    def circle_vs_rest(cls, omega, labels=("circle", "interior")):
        return cls(labels, np.where(omega.circle_segments, 0, 1)).check(omega)

    @classmethod
    def by_direction(cls, omega):
        """Square-style split by the dominant outward normal of each segment."""
        d = omega.ends - omega.starts
        normal = -1j * d
        ang = np.mod(np.angle(normal) + np.pi / 4, 2.0 * np.pi)
        return cls(("right", "top", "left", "bottom"), (ang // (np.pi / 2)).astype(int)).check(omega)

    def to_dict(self):
        return {"labels": list(self.labels), "segment_part": self.segment_part.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["labels"]), np.asarray(data["segment_part"]))
