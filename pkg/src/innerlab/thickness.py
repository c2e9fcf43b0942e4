"""Thickness and angular-derivative criteria.

The strip model is 𝒮 = {-1/2 < Im z < 1/2}; a graph domain removes a bottom
layer of height h1(x) and a top layer of height h2(x).
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ValidationError

H_MAX = 1.0 / 6.0


class Verdict(str, enum.Enum):
    THICK = "thick"
    NOT_THICK = "not_thick"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class StripGraphDomain:
    """{x + iy : -1/2 + h1(x) <= y <= 1/2 - h2(x)} sampled on a uniform x-grid."""

    x: np.ndarray
    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        h1 = np.broadcast_to(np.asarray(self.h1, dtype=float), x.shape).copy()
        h2 = np.broadcast_to(np.asarray(self.h2, dtype=float), x.shape).copy()
        if x.ndim != 1 or x.size < 2:
            raise ValidationError("x must be a 1-d grid with at least two samples")
        steps = np.diff(x)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(x).max()):
            raise ValidationError("x must be a uniform increasing grid")
        for name, h in (("h1", h1), ("h2", h2)):
            if np.any(h < 0) or np.any(h >= H_MAX) or not np.all(np.isfinite(h)):
                raise ValidationError(f"{name} must take values in [0, 1/6)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @classmethod
    def from_functions(cls, x_min, x_max, n, h1=None, h2=None):
        x = np.linspace(x_min, x_max, n)
        zero = np.zeros_like(x)
        return cls(x, zero if h1 is None else h1(x), zero if h2 is None else h2(x))

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    def check_window(self, x1, x2):
        if not (self.x[0] - 1e-12 <= x1 < x2 <= self.x[-1] + 1e-12):
            raise DomainError(f"window [{x1}, {x2}] outside the sampled range")


def capped(h, cap=0.99 * H_MAX):
    """Wrap a profile so its values stay below the 1/6 ceiling."""
    return lambda x: np.minimum(cap, h(x))


# Fixture families: profile, analytic verdict.
STRIP_FIXTURES = {
    "inverse-square": (lambda x: x ** -2.0, Verdict.THICK),
    "inverse": (lambda x: 1.0 / x, Verdict.NOT_THICK),
}
DYADIC_WINDOWS = tuple((2.0 ** k, 2.0 ** (k + 1)) for k in range(3, 7))


def strip_fixture(name, x_max=128.0, per_unit=1000):
    """Bottom graph h = min(h(x), 0.99/6) on [1, x_max], top side flat."""
    try:
        h, verdict = STRIP_FIXTURES[name]
    except KeyError:
        raise ValidationError(f"unknown strip fixture {name!r}") from None
    n = int(round((x_max - 1.0) * per_unit)) + 1
    return StripGraphDomain.from_functions(1.0, x_max, n, capped(h)), verdict


def _union_height_area(centers, widths, heights, x1, x2):
    """∫_{x1}^{x2} max{height of intervals covering t} dt, exactly, by sweep."""
    lo = centers - widths / 2.0
    hi = centers + widths / 2.0
    keep = (heights > 0) & (hi > x1) & (lo < x2)
    lo, hi, heights = np.clip(lo[keep], x1, x2), np.clip(hi[keep], x1, x2), heights[keep]
    if lo.size == 0:
        return 0.0
    order = np.argsort(lo, kind="stable")
    lo, hi, heights = lo[order], hi[order], heights[order]
    area = 0.0
    active: list = []  # max-heap of (-height, end)
    t = lo[0]
    i = 0
    n = lo.size
    while i < n or active:
        while active and active[0][1] <= t:
            heapq.heappop(active)
        if not active:
            if i >= n:
                break
            t = max(t, lo[i])
        while i < n and lo[i] <= t:
            heapq.heappush(active, (-heights[i], hi[i]))
            i += 1
        while active and active[0][1] <= t:
            heapq.heappop(active)
        if not active:
            continue
        top, end = active[0]
        nxt = min(end, lo[i]) if i < n else end
        area += -top * (nxt - t)
        t = nxt
    return float(area)


def strip_area_deficit(U: StripGraphDomain, x1, x2, k=2.0) -> float:
    """Area of the union of boundary squares Q(x, y, k) inside 𝒮(x1, x2).

    Each sample x with h > 0 contributes a square of side k·h resting on the
    corresponding strip side. The union is computed exactly as the integral of
    the upper envelope.
    """
    U.check_window(x1, x2)
    if not 0.5 <= k <= 2.0:
        raise DomainError("k must lie in [1/2, 2]")
    total = 0.0
    for h in (U.h1, U.h2):
        side = k * h
        total += _union_height_area(U.x, side, side, x1, x2)
    return total


def classify_trend(values, tol, trailing=2) -> Verdict:
    """Finite-window verdict for 'values → 0'.

    thick: the trailing values are below tol and nonincreasing.
    not_thick: every trailing value exceeds 10·tol and the last is at least
    0.9 times the first (no decay).
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return Verdict.INCONCLUSIVE
    tail = values[-min(trailing, values.size):]
    if np.all(tail < tol) and np.all(np.diff(tail) <= tol * 1e-6 + 1e-15):
        return Verdict.THICK
    if np.all(values[-trailing:] > 10.0 * tol) and values[-1] >= 0.9 * values[0]:
        return Verdict.NOT_THICK
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class WindowedVerdict:
    verdict: Verdict
    windows: tuple
    values: tuple
    tol: float


def _check_windows(windows):
    windows = [tuple(w) for w in windows]
    starts = [w[0] for w in windows]
    if starts != sorted(starts):
        raise DomainError("windows must increase toward x_max")
    return windows


def is_thick_strip(U: StripGraphDomain, windows, tol=0.05, k=2.0) -> WindowedVerdict:
    windows = _check_windows(windows)
    values = [strip_area_deficit(U, a, b, k) for a, b in windows]
    return WindowedVerdict(classify_trend(values, tol), tuple(windows), tuple(values), tol)


@dataclass(frozen=True)
class StripIntegral:
    value: float
    x_max: float
    tail_unintegrated: bool = True


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def strip_integral(U: StripGraphDomain) -> StripIntegral:
    """Trapezoid ∫ (h1 + h2) dx over the sampled range; the tail beyond is not integrated."""
    return StripIntegral(_trapezoid(U.h1 + U.h2, U.x), float(U.x[-1]))


def window_integrals(U: StripGraphDomain, windows):
    out = []
    for a, b in windows:
        U.check_window(a, b)
        sel = (U.x >= a - 1e-12) & (U.x <= b + 1e-12)
        out.append(_trapezoid((U.h1 + U.h2)[sel], U.x[sel]))
    return out


def strip_integral_verdict(U: StripGraphDomain, windows, tol=0.025) -> WindowedVerdict:
    """Finiteness of ∫ (h1 + h2) judged by the decay of per-window integrals.

    THICK here means 'integral finite' (the necessary condition holds).
    """
    windows = _check_windows(windows)
    values = window_integrals(U, windows)
    return WindowedVerdict(classify_trend(values, tol), tuple(windows), tuple(values), tol)


def doubling_check(x, h, c) -> bool:
    """h(x) >= c·h(x0) whenever |x - x0| < c·h(x0), over all sample pairs."""
    if not 0 < c <= 1:
        raise DomainError("c must lie in (0, 1]")
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    for i in np.flatnonzero(h > 0):
        reach = c * h[i]
        lo = np.searchsorted(x, x[i] - reach, side="right")
        hi = np.searchsorted(x, x[i] + reach, side="left")
        if np.any(h[lo:hi] < c * h[i]):
            return False
    return True


def _shell_growth(shells):
    """Ratio of consecutive dyadic shell sums near the singular point."""
    shells = np.asarray(shells, dtype=float)
    tail = shells[-4:]
    if np.all(tail == 0):
        return 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
    ratios = ratios[np.isfinite(ratios)]
    return float(ratios.max()) if ratios.size else math.inf


def disk_thickness_integral(h, p=0.0, shells=40, growth_cutoff=0.9, gauss=16) -> float:
    """∫_{∂𝔻} h(ζ)/|ζ - p|² |dζ| with |dζ| = dθ.

    ``h`` is either an array of samples at θ_j = 2πj/N (the cell around p is
    excluded) or a callable of the angle, integrated over dyadic shells
    π2^{-k-1} < |θ - p| <= π2^{-k} by Gauss-Legendre. If the last shell sums do
    not decay by at least ``growth_cutoff`` per shell the integral is reported
    as +inf; otherwise the geometric tail is added.
    """
    if callable(h):
        nodes, weights = np.polynomial.legendre.leggauss(gauss)
        sums = []
        for k in range(shells):
            a, b = math.pi * 2.0 ** (-k - 1), math.pi * 2.0 ** (-k)
            t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            w = 0.5 * (b - a) * weights
            total = 0.0
            for sign in (1.0, -1.0):
                theta = p + sign * t
                vals = np.asarray(h(theta), dtype=float)
                total += float(np.sum(w * vals / np.abs(np.exp(1j * theta) - np.exp(1j * p)) ** 2))
            sums.append(total)
    else:
        samples = np.asarray(h, dtype=float)
        n = samples.size
        theta = 2.0 * np.pi * np.arange(n) / n
        offset = np.abs(np.angle(np.exp(1j * (theta - p))))
        cell = 2.0 * np.pi / n
        far = offset > cell / 2.0
        integrand = np.zeros(n)
        integrand[far] = samples[far] / np.abs(np.exp(1j * theta[far]) - np.exp(1j * p)) ** 2 * cell
        sums = []
        k = 0
        while math.pi * 2.0 ** (-k - 1) > cell:
            a, b = math.pi * 2.0 ** (-k - 1), math.pi * 2.0 ** (-k)
            sums.append(float(integrand[(offset > a) & (offset <= b)].sum()))
            k += 1
        if len(sums) >= 3 and _shell_growth(sums) >= growth_cutoff:
            return math.inf
        # Shells inside the last full one (the excluded cell included) are
        # replaced by their geometric extrapolation.
        rho = _shell_growth(sums) if len(sums) >= 2 else 0.0
        return float(sum(sums)) + sums[-1] * rho / (1.0 - rho)
    total = float(sum(sums))
    rho = _shell_growth(sums)
    if rho >= growth_cutoff:
        return math.inf
    return total + sums[-1] * rho / (1.0 - rho)


@dataclass(frozen=True)
class ApproachRegion:
    """{x + iy : y > f(x)} with f sampled on x > 0 (mirrored when symmetric)."""

    x: np.ndarray
    f: np.ndarray
    symmetric: bool = True
    degenerate: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if np.any(x <= 0) or np.any(np.diff(x) <= 0):
            raise ValidationError("x samples must be positive and increasing")
        if np.any(f < 0) or np.any(f > np.abs(x) / 4.0 + 1e-15):
            raise ValidationError("approach profile must satisfy 0 <= f(x) <= |x|/4")
        deg = np.zeros(x.shape, dtype=bool) if self.degenerate is None else np.asarray(self.degenerate)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "degenerate", deg)

    @property
    def is_degenerate(self):
        return bool(np.any(self.degenerate))

    def profile(self, t):
        """f(|t|), quadratic below the first sample and flat past the last."""
        t = np.abs(np.asarray(t, dtype=float))
        x0, f0 = self.x[0], self.f[0]
        inside = np.interp(t, self.x, self.f)
        return np.where(t < x0, f0 * (t / x0) ** 2, inside)


def measure_approach_region(mu, c, x_grid) -> ApproachRegion:
    """f(x) = c·x²/μ(0, x/2), clamped to x/4; μ(0, x/2) = 0 is flagged degenerate.

    μ is a CircleMeasure read near angle 0 with x ↔ arclength.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    x = np.asarray(x_grid, dtype=float)
    masses = np.array([mu.centered_arc_mass(0.0, xi / 2.0) for xi in x])
    degenerate = masses <= 0.0
    with np.errstate(divide="ignore"):
        f = np.where(degenerate, np.inf, c * x**2 / np.where(degenerate, 1.0, masses))
    return ApproachRegion(x, np.minimum(f, x / 4.0), True, degenerate)


def approach_region_integral(region: ApproachRegion, **kwargs) -> float:
    """Disk thickness integral of the region's boundary profile around p = 0."""
    if region.degenerate[0]:
        return math.inf
    limit = float(region.x[-1])
    return disk_thickness_integral(
        lambda t: np.where(np.abs(t) <= limit, region.profile(t), 0.0), 0.0, **kwargs
    )


@dataclass
class MapOracle:
    """A conformal map given by closed forms.

    ``boundary`` returns φ(ζ) for a boundary angle (or None when undeclared);
    ``derivative`` is the exact φ′ when known.
    """

    func: Callable
    domain: str = "disk"
    target: str = "disk"
    derivative: Optional[Callable] = None
    boundary: Optional[Callable] = None
    base_point: complex = 0j
    name: str = "map"
    meta: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.func(z)

    def boundary_value(self, theta):
        if self.boundary is None:
            raise DomainError(f"{self.name}: boundary values are not declared")
        value = self.boundary(theta)
        if value is None:
            raise DomainError(f"{self.name}: no boundary value at θ={theta}")
        return complex(value)

    def check_samples(self, z):
        w = np.asarray(self.func(np.asarray(z)))
        if self.target == "disk":
            return bool(np.all(np.abs(w) < 1.0))
        return bool(np.all(np.abs(w.imag) < 0.5))


def identity_oracle():
    return MapOracle(lambda z: z, derivative=lambda z: np.ones_like(z),
                     boundary=lambda t: np.exp(1j * t), name="identity")


def power_oracle(d=2):
    return MapOracle(lambda z: z**d, derivative=lambda z: d * z ** (d - 1),
                     boundary=lambda t: np.exp(1j * d * t), name=f"z^{d}")


def moebius_oracle(a, rotation=0.0):
    from .mobius_blaschke import Moebius

    m = Moebius(a, rotation)
    return MapOracle(m, derivative=m.deriv, boundary=lambda t: m(np.exp(1j * t)),
                     base_point=complex(m.inverse()(0.0)), name=f"moebius({a})")


def singular_oracle():
    from .mobius_blaschke import motivating_limit

    F = motivating_limit()

    def boundary(theta):
        zeta = np.exp(1j * theta)
        if abs(zeta + 1.0) < 1e-12:
            return None
        return F(zeta)

    return MapOracle(F, derivative=F.deriv, boundary=boundary, name="S_delta(-1)")


def horodisk_point(zeta, c, rho, angle):
    """Point of the horodisk {P_ζ > c} at relative radius rho and angle from its center."""
    radius = 1.0 / (1.0 + c)
    return zeta / (1.0 + c) + rho * radius * np.exp(1j * angle)


def julia_check(phi: MapOracle, zeta_theta, M, c_grid=(0.5, 1.0, 2.0, 5.0, 20.0), samples=512,
                seed=0) -> bool:
    """Sampled check of φ(ℋ_c(ζ)) ⊂ ℋ_{c/M}(φ(ζ)) where ℋ_c(ζ) = {Re((ζ+z)/(ζ−z)) > c}.

    Samples mix a uniform cloud in each horodisk with points just inside its
    boundary circle, where the inclusion is tight.
    """
    if not M > 0:
        raise DomainError("M must be positive")
    zeta = complex(np.exp(1j * zeta_theta))
    w0 = phi.boundary_value(zeta_theta)
    rng = np.random.default_rng(seed)
    for c in c_grid:
        angles = rng.uniform(0.0, 2.0 * np.pi, samples)
        rho = np.concatenate([np.sqrt(rng.uniform(size=samples // 2)), np.full(samples - samples // 2, 0.999)])
        boundary_sweep = np.linspace(-1.0, 1.0, samples) * 0.3
        z = np.concatenate([
            horodisk_point(zeta, c, rho, angles),
            # Inner ring right next to ζ, where the Julia bound is sharp.
            horodisk_point(zeta, c, 0.999, np.angle(zeta) + boundary_sweep),
        ])
        herglotz = ((zeta + z) / (zeta - z)).real
        z = z[(herglotz > c) & (np.abs(z) < 1.0)]
        w = np.asarray(phi(z))
        image = ((w0 + w) / (w0 - w)).real
        if np.any(image <= c / M - 1e-9):
            return False
    return True


DEFAULT_R_GRID = 1.0 - np.geomspace(1e-2, 1e-6, 13)


def angular_derivative_radial(phi: MapOracle, q_theta, r_grid=None, sentinel=1e6) -> float:
    """lim (1 - |φ(rq)|)/(1 - r) by Richardson extrapolation on the last three radii.

    Returns +inf when the quotient exceeds ``sentinel`` or grows like a power
    of 1/(1-r) (log-slope > 1/2 over the grid).
    """
    r = np.asarray(DEFAULT_R_GRID if r_grid is None else r_grid, dtype=float)
    if r.size < 3 or np.any(np.diff(r) <= 0) or r[-1] >= 1.0:
        raise DomainError("r_grid must increase strictly inside (0, 1) with >= 3 nodes")
    points = r * np.exp(1j * q_theta)
    t = 1.0 - np.abs(points)
    quotient = (1.0 - np.abs(np.asarray(phi(points)))) / t
    if np.any(~np.isfinite(quotient)) or quotient[-1] > sentinel:
        return math.inf
    if quotient[0] > 0 and quotient[-1] > 0:
        slope = math.log(quotient[-1] / quotient[0]) / math.log(t[0] / t[-1])
        if slope > 0.5:
            return math.inf
    return float(_neville_at_zero(t[-3:], quotient[-3:]))


def _neville_at_zero(t, y):
    t = list(map(float, t))
    p = list(map(float, y))
    n = len(t)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = (t[j] * p[i] - t[i] * p[i + 1]) / (t[j] - t[i])
    return p[0]
