"""Walk on spheres for harmonic measure on polygonal domains.

Each walk draws its angles from a counter-based generator keyed by
(seed, walk index, step), so results do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np
from scipy.spatial import cKDTree
from numba import njit, prange

from ..errors import ValidationError
from .domains import BoundaryPartition, PolylineJordanDomain

if "NUMBA_THREADING_LAYER" not in os.environ:
    # The bundled TBB is too old for numba; avoid the warning and use the portable layer.
    numba.config.THREADING_LAYER = "workqueue"

ABSORB_REL = 1e-6
MAX_STEPS = 10_000


def configure_threads():
    """Apply INNERLAB_THREADS (if set) as the numba thread count."""
    value = os.environ.get("INNERLAB_THREADS")
    if value:
        numba.set_num_threads(max(1, min(int(value), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True, inline="always")
def _splitmix64(x):
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


@njit(cache=True, inline="always")
def _uniform(seed, walk, step):
    key = _splitmix64(seed ^ _splitmix64(np.uint64(walk) * np.uint64(0xD1B54A32D192ED03) + np.uint64(step)))
    return (key >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def _segment_distance(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    length2 = dx * dx + dy * dy
    t = 0.0
    if length2 > 0.0:
        t = ((px - ax) * dx + (py - ay) * dy) / length2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = ax + t * dx
    qy = ay + t * dy
    return math.hypot(px - qx, py - qy), qx, qy


@njit(cache=True)
def _nearest_all(px, py, ax, ay, bx, by):
    best = np.inf
    seg = -1
    qx = px
    qy = py
    for k in range(ax.size):
        d, x, y = _segment_distance(px, py, ax[k], ay[k], bx[k], by[k])
        if d < best:
            best = d
            seg = k
            qx = x
            qy = y
    return best, seg, qx, qy


@njit(cache=True, parallel=True)
def _walk_kernel(ax, ay, bx, by, x0, y0, origin_x, origin_y, cell, nx, ny, lower, deep,
                 cand_ptr, cand_idx, eps, max_steps, seed, n_walks, out_seg, out_x, out_y, out_steps):
    two_pi = 2.0 * math.pi
    useed = np.uint64(seed)
    for w in prange(n_walks):
        x = x0
        y = y0
        done = False
        for step in range(max_steps):
            i = int((x - origin_x) / cell)
            j = int((y - origin_y) / cell)
            i = min(max(i, 0), nx - 1)
            j = min(max(j, 0), ny - 1)
            c = j * nx + i
            if deep[c]:
                r = lower[c]
            else:
                r = np.inf
                seg = -1
                qx = x
                qy = y
                for m in range(cand_ptr[c], cand_ptr[c + 1]):
                    k = cand_idx[m]
                    d, sx, sy = _segment_distance(x, y, ax[k], ay[k], bx[k], by[k])
                    if d < r:
                        r = d
                        seg = k
                        qx = sx
                        qy = sy
                if seg < 0:
                    r, seg, qx, qy = _nearest_all(x, y, ax, ay, bx, by)
                if r < eps:
                    out_seg[w] = seg
                    out_x[w] = qx
                    out_y[w] = qy
                    out_steps[w] = step
                    done = True
                    break
            angle = two_pi * _uniform(useed, w, step)
            x += r * math.cos(angle)
            y += r * math.sin(angle)
        if not done:
            # Step cap reached: assign the walk to the nearest boundary segment.
            d, seg, qx, qy = _nearest_all(x, y, ax, ay, bx, by)
            out_seg[w] = seg
            out_x[w] = qx
            out_y[w] = qy
            out_steps[w] = max_steps


@dataclass
class _Accel:
    origin: complex
    cell: float
    nx: int
    ny: int
    lower: np.ndarray
    deep: np.ndarray
    cand_ptr: np.ndarray
    cand_idx: np.ndarray


_ACCEL_CACHE: dict = {}


def _acceleration(omega: PolylineJordanDomain, resolution=512) -> _Accel:
    key = (omega.vertices.tobytes(), resolution)
    if key in _ACCEL_CACHE:
        return _ACCEL_CACHE[key]
    v = omega.vertices
    xmin, xmax, ymin, ymax = v.real.min(), v.real.max(), v.imag.min(), v.imag.max()
    span = max(xmax - xmin, ymax - ymin)
    cell = span * (1.0 + 1e-9) / resolution
    nx = int(math.ceil((xmax - xmin) / cell)) + 1
    ny = int(math.ceil((ymax - ymin) / cell)) + 1
    origin = complex(xmin - 0.5 * cell, ymin - 0.5 * cell)
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny))
    cx = origin.real + (ii.ravel() + 0.5) * cell
    cy = origin.imag + (jj.ravel() + 0.5) * cell
    # Sample every segment at spacing <= cell/2; a sample distance is an upper
    # bound for the true distance and exceeds it by at most half the spacing.
    starts, ends = omega.starts, omega.ends
    per = np.maximum(1, np.ceil(np.abs(ends - starts) / (0.5 * cell))).astype(np.int64)
    seg_of = np.repeat(np.arange(starts.size), per)
    offsets = np.arange(seg_of.size) - np.repeat(np.cumsum(per) - per, per)
    t = (offsets + 0.5) / per[seg_of]
    samples = starts[seg_of] + t * (ends - starts)[seg_of]
    spacing = float(np.max(np.abs(ends - starts) / per))
    tree = cKDTree(np.column_stack([samples.real, samples.imag]))
    upper, _ = tree.query(np.column_stack([cx, cy]))
    half_diag = 0.5 * cell * math.sqrt(2.0)
    lower = np.maximum(upper - 0.5 * spacing - half_diag, 0.0)
    inside = omega.contains(cx + 1j * cy)
    deep = inside & (lower >= 4.0 * half_diag)
    # Cells a walk can visit: center inside, or the cell meets the boundary.
    near = np.flatnonzero(~deep & (inside | (lower <= 0.0)))
    radius = upper[near] + 2.0 * half_diag + 0.5 * spacing
    hits = tree.query_ball_point(np.column_stack([cx[near], cy[near]]), radius)
    counts = np.zeros(nx * ny, dtype=np.int64)
    lists = []
    for c, h in zip(near, hits):
        segs = np.unique(seg_of[np.asarray(h, dtype=np.int64)])
        counts[c] = segs.size
        lists.append(segs)
    ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    segs = np.concatenate(lists) if lists else np.zeros(0, dtype=np.int64)
    accel = _Accel(origin, cell, nx, ny, lower.astype(float), deep, ptr, segs.astype(np.int64))
    _ACCEL_CACHE[key] = accel
    return accel


@dataclass(frozen=True)
class WalkResult:
    segments: np.ndarray
    exits: np.ndarray
    steps: np.ndarray
    n_walks: int
    seed: int

    @property
    def capped(self):
        return int(np.count_nonzero(self.steps >= MAX_STEPS))


def run_walks(omega: PolylineJordanDomain, w, n_walks, seed=0, absorb_rel=ABSORB_REL,
              max_steps=MAX_STEPS, resolution=512) -> WalkResult:
    """Run ``n_walks`` walks from w; returns exit segment indices and exit points."""
    w = omega.check_interior(w, "start point")
    configure_threads()
    acc = _acceleration(omega, resolution)
    n_walks = int(n_walks)
    seg = np.empty(n_walks, dtype=np.int64)
    ex = np.empty(n_walks)
    ey = np.empty(n_walks)
    steps = np.empty(n_walks, dtype=np.int64)
    a, b = omega.starts, omega.ends
    _walk_kernel(a.real.copy(), a.imag.copy(), b.real.copy(), b.imag.copy(), w.real, w.imag,
                 acc.origin.real, acc.origin.imag, acc.cell, acc.nx, acc.ny, acc.lower, acc.deep,
                 acc.cand_ptr, acc.cand_idx, absorb_rel * omega.diameter, int(max_steps),
                 int(seed) & 0xFFFFFFFFFFFFFFFF, n_walks, seg, ex, ey, steps)
    return WalkResult(seg, ex + 1j * ey, steps, n_walks, int(seed))


@dataclass(frozen=True)
class HarmonicMeasureEstimate:
    labels: tuple
    estimates: tuple
    sigmas: tuple
    n_walks: int
    seed: int


def wos_harmonic_measure(omega: PolylineJordanDomain, w, parts: BoundaryPartition, n_walks=10_000,
                         seed=0, **kwargs) -> HarmonicMeasureEstimate:
    """Walk-on-spheres estimate of ω_{Ω,w} on each part; the estimates sum to 1."""
    if n_walks < 10_000:
        raise ValidationError("n_walks must be at least 10^4")
    parts.check(omega)
    result = run_walks(omega, w, n_walks, seed, **kwargs)
    counts = np.bincount(parts.segment_part[result.segments], minlength=len(parts.labels))
    p = counts / n_walks
    sig = np.sqrt(p * (1.0 - p) / n_walks)
    return HarmonicMeasureEstimate(parts.labels, tuple(p.tolist()), tuple(sig.tolist()), n_walks, int(seed))
