"""Green's functions of polygonal domains by finite differences.

G_Ω(p, ·) = S - h, where S is the singular part (G_𝔻(p, ·) for domains in
the disk, log 1/|· - p| otherwise) and h is the harmonic function with h = S
on ∂Ω. Only h is discretized, so the grid never sees the logarithmic pole.
The Laplacian uses Shortley–Weller stencils on a tensor grid: a stencil arm
that leaves Ω is cut at the boundary crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import shapely
from scipy.sparse.linalg import spsolve

from ..errors import DomainError
from ..mobius_blaschke import green_disk
from .domains import PolylineJordanDomain

__all__ = ["green_disk", "green_grid", "green_quotient_profile", "graded_nodes", "TensorGreenSolution"]


def _singular(omega, p, z):
    z = np.asarray(z, dtype=complex)
    if omega.contained_in_disk:
        return np.log(np.abs(1.0 - np.conj(p) * z)) - np.log(np.abs(z - p))
    return -np.log(np.abs(z - p))


@dataclass
class TensorGreenSolution:
    xs: np.ndarray
    ys: np.ndarray
    inside: np.ndarray  # (ny, nx)
    h: np.ndarray  # harmonic correction, nan outside
    p: complex
    omega: PolylineJordanDomain

    def at_node(self, z, tol=1e-12):
        i = int(np.argmin(np.abs(self.xs - z.real)))
        j = int(np.argmin(np.abs(self.ys - z.imag)))
        if abs(self.xs[i] - z.real) > tol or abs(self.ys[j] - z.imag) > tol:
            raise DomainError(f"{z} is not a grid node")
        if not self.inside[j, i]:
            raise DomainError(f"{z} is not an interior node")
        return float(_singular(self.omega, self.p, complex(z)) - self.h[j, i])


def _crossings(omega, a, b):
    """Distance from a along [a, b] to the first boundary crossing, and the crossing point."""
    lines = shapely.linestrings(np.stack([np.column_stack([a.real, a.imag]),
                                          np.column_stack([b.real, b.imag])], axis=1))
    ring = omega.polygon.exterior
    shapely.prepare(ring)
    hits = shapely.intersection(lines, ring)
    coords, index = shapely.get_coordinates(hits, return_index=True)
    pts = coords[:, 0] + 1j * coords[:, 1]
    dist = np.abs(pts - a[index])
    best = np.full(a.size, np.inf)
    np.minimum.at(best, index, dist)
    if np.any(~np.isfinite(best)):
        # A crossing can be missed only in floating-point ties; fall back to the far end.
        best = np.where(np.isfinite(best), best, np.abs(b - a))
    direction = (b - a) / np.abs(b - a)
    cross = a + best * direction
    # Snap crossings on circle segments onto the circle itself.
    tree = shapely.STRtree(shapely.linestrings(np.stack([
        np.column_stack([omega.starts.real, omega.starts.imag]),
        np.column_stack([omega.ends.real, omega.ends.imag])], axis=1)))
    seg = tree.query_nearest(shapely.points(cross.real, cross.imag), all_matches=False)[1]
    on_circle = omega.circle_segments[seg]
    if np.any(on_circle):
        ac, dc = a[on_circle], direction[on_circle]
        # |a + t d|² = 1, smallest positive root.
        bq = (ac * np.conj(dc)).real
        cq = np.abs(ac) ** 2 - 1.0
        t = -bq + np.sqrt(np.maximum(bq * bq - cq, 0.0))
        best[on_circle] = t
        cross[on_circle] = ac + t * dc
    return best, cross


def _solve(omega: PolylineJordanDomain, p, xs, ys) -> TensorGreenSolution:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    inside = omega.contains(Z)
    ny, nx = inside.shape
    index = -np.ones(inside.shape, dtype=np.int64)
    index[inside] = np.arange(int(inside.sum()))
    n = int(inside.sum())
    if n == 0:
        raise DomainError("grid has no interior nodes")
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    rhs = np.zeros(n)
    jj, ii = np.nonzero(inside)
    here = Z[jj, ii]
    arms = {}
    for name, (dj, di) in {"e": (0, 1), "w": (0, -1), "n": (1, 0), "s": (-1, 0)}.items():
        tj, ti = jj + dj, ii + di
        valid = (tj >= 0) & (tj < ny) & (ti >= 0) & (ti < nx)
        nb_inside = np.zeros(n, dtype=bool)
        nb_inside[valid] = inside[tj[valid], ti[valid]]
        length = np.full(n, np.nan)
        target = np.full(n, np.nan, dtype=complex)
        length[valid] = np.abs(Z[tj[valid], ti[valid]] - here[valid])
        target[valid] = Z[tj[valid], ti[valid]]
        cut = ~nb_inside
        if np.any(cut & ~valid):
            raise DomainError("grid does not cover the domain")
        dist, point = _crossings(omega, here[cut], target[cut])
        length[cut] = dist
        arms[name] = (nb_inside, tj, ti, length, cut, point)
    # Boundary values of h: the singular part at the crossing points.
    for axis in (("e", "w"), ("n", "s")):
        a, b = (arms[k] for k in axis)
        la, lb = a[3], b[3]
        denom = la + lb
        for arm, l_self in ((a, la), (b, lb)):
            nb_inside, tj, ti, length, cut, point = arm
            coef = 2.0 / (l_self * denom)
            diag -= coef
            interior = ~cut
            rows.append(np.flatnonzero(interior))
            cols.append(index[tj[interior], ti[interior]])
            vals.append(coef[interior])
            g = _singular(omega, p, point)
            np.add.at(rhs, np.flatnonzero(cut), -coef[cut] * g)
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    # Row scaling by the diagonal keeps the factorization well conditioned on graded grids.
    scale = 1.0 / -diag
    A = sp.diags(scale) @ A
    u = spsolve(A.tocsc(), rhs * scale)
    h = np.full(inside.shape, np.nan)
    h[inside] = u
    return TensorGreenSolution(xs, ys, inside, h, complex(p), omega)


def green_grid(omega: PolylineJordanDomain, p, z, delta) -> float:
    """G_Ω(p, z) on a uniform grid of spacing δ that has z as a node."""
    p = omega.check_interior(p, "pole")
    z = omega.check_interior(z, "evaluation point")
    if abs(p - z) <= 4.0 * delta:
        raise DomainError("pole and evaluation point must be more than 4δ apart")
    if float(omega.distance_to_boundary(z)) < 1e-3 * delta:
        raise DomainError("evaluation point is too close to the boundary for this grid")
    v = omega.vertices
    lo_x = z.real - delta * math.ceil((z.real - v.real.min()) / delta + 1)
    hi_x = z.real + delta * math.ceil((v.real.max() - z.real) / delta + 1)
    lo_y = z.imag - delta * math.ceil((z.imag - v.imag.min()) / delta + 1)
    hi_y = z.imag + delta * math.ceil((v.imag.max() - z.imag) / delta + 1)
    xs = z.real + delta * np.arange(round((lo_x - z.real) / delta), round((hi_x - z.real) / delta) + 1)
    ys = z.imag + delta * np.arange(round((lo_y - z.imag) / delta), round((hi_y - z.imag) / delta) + 1)
    return _solve(omega, p, xs, ys).at_node(z)


def graded_nodes(center, lo, hi, fine, growth=1.1, coarse=0.01, extra=()):
    """Sorted nodes on [lo, hi] with spacing ``fine`` at ``center`` growing geometrically to ``coarse``."""
    offsets = [0.0]
    step = fine
    while offsets[-1] < max(center - lo, hi - center):
        offsets.append(offsets[-1] + step)
        step = min(step * growth, coarse)
    offsets = np.asarray(offsets)
    nodes = np.concatenate([center - offsets[::-1], center + offsets[1:]])
    nodes = nodes[(nodes >= lo) & (nodes <= hi)]
    nodes = np.union1d(nodes, np.asarray(extra, dtype=float))
    # Drop grid nodes crowding a requested node.
    extra = np.asarray(extra, dtype=float)
    if extra.size:
        spacing = np.gradient(nodes)
        near = np.min(np.abs(nodes[:, None] - extra[None, :]), axis=1)
        keep = (near == 0.0) | (near > 0.3 * spacing)
        nodes = nodes[keep]
    return nodes


def green_quotient_profile(omega: PolylineJordanDomain, p, zeta_theta, radii, fine=1e-5, growth=1.1,
                           coarse=0.01):
    """G_Ω(p, rζ)/G_𝔻(p, rζ) for each r, from one graded-grid solve.

    The domain is rotated so that ζ = 1; the grid is graded toward 1 and has
    every profile point as a node.
    """
    if not omega.touches_circle_at(zeta_theta):
        raise DomainError("ζ must lie on ∂Ω ∩ ∂𝔻")
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0 or radii[-1] >= 1:
        raise DomainError("radii must increase strictly inside (0, 1)")
    rot = complex(math.cos(zeta_theta), -math.sin(zeta_theta))
    local = PolylineJordanDomain(omega.vertices * rot, omega.contained_in_disk, omega.name)
    q = complex(p) * rot
    local.check_interior(q, "pole")
    for r in radii:
        local.check_interior(complex(r), "profile point")
    v = local.vertices
    margin = 2.0 * coarse
    xs = graded_nodes(1.0, v.real.min() - margin, v.real.max() + margin, fine, growth, coarse, extra=radii)
    ys = graded_nodes(0.0, v.imag.min() - margin, v.imag.max() + margin, fine, growth, coarse, extra=(0.0,))
    sol = _solve(local, q, xs, ys)
    return [sol.at_node(complex(r)) / green_disk(q, complex(r)) for r in radii]
