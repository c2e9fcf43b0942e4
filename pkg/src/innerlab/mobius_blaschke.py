"""Finite Blaschke products, Möbius maps and atomic singular inner functions.

Points of the disk are plain Python / numpy complex numbers. Every evaluator
accepts scalars or arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyWarning, DomainError, RootFindingError
from .roots import aberth, cluster, cluster_multiple

CIRCLE_TOL = 1e-12
INTERIOR_ROOT_MARGIN = 1e-10
CLUSTER_TOL = 1e-6
ZERO_SEPARATION = 1e-12


def in_open_disk(z):
    return np.abs(z) < 1.0


def on_circle(z, tol=CIRCLE_TOL):
    return np.abs(np.abs(z) - 1.0) <= tol


def _as_complex(z):
    if np.isscalar(z):
        return complex(z)
    return np.asarray(z, dtype=complex)


def _scalar_out(value, z):
    if np.isscalar(z):
        return complex(value)
    return value


@dataclass(frozen=True)
class Moebius:
    """z -> e^{i rotation} (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "rotation", float(self.rotation))
        if abs(self.a) >= 1.0:
            raise DomainError(f"Moebius center must lie in the open disk, got |a|={abs(self.a)}")

    @property
    def unit(self):
        return complex(math.cos(self.rotation), math.sin(self.rotation))

    def is_identity(self):
        return self.a == 0 and self.rotation == 0.0

    def __call__(self, z):
        z = _as_complex(z)
        if self.is_identity():
            return z
        return self.unit * (z - self.a) / (1.0 - self.a.conjugate() * z)

    def deriv(self, z):
        z = _as_complex(z)
        value = self.unit * (1.0 - abs(self.a) ** 2) / (1.0 - self.a.conjugate() * z) ** 2
        return _scalar_out(value, z) if np.isscalar(z) else value

    def inverse(self):
        return Moebius(-self.a * self.unit, -self.rotation)

    def compose(self, inner: "Moebius") -> "Moebius":
        """self ∘ inner."""
        b = inner.inverse()(self.a)
        b = complex(b)
        unit = self.deriv(inner(b)) * inner.deriv(b) * (1.0 - abs(b) ** 2)
        return Moebius(b, math.atan2(unit.imag, unit.real))

    def to_dict(self):
        return {"a_re": self.a.real, "a_im": self.a.imag, "rotation": self.rotation}

    @classmethod
    def from_dict(cls, data):
        return cls(complex(data.get("a_re", 0.0), data.get("a_im", 0.0)), data.get("rotation", 0.0))


@dataclass(frozen=True)
class BlaschkeProduct:
    """e^{i rotation} prod_k ((z - a_k) / (1 - conj(a_k) z))^{m_k}.

    ``zeros`` is a tuple of (a_k, m_k) pairs with distinct a_k.
    """

    zeros: tuple
    rotation: float = 0.0

    def __post_init__(self):
        merged: dict = {}
        for a, m in self.zeros:
            a = complex(a)
            m = int(m)
            if m < 1:
                raise DomainError(f"zero multiplicities must be positive, got {m}")
            if not abs(a) < 1.0:
                raise DomainError(f"Blaschke zeros must lie in the open disk, got {a}")
            merged[a] = merged.get(a, 0) + m
        if not merged:
            raise DomainError("a Blaschke product needs at least one zero")
        pts = np.array(list(merged))
        if pts.size > 1:
            gaps = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size)
            if gaps.min() < ZERO_SEPARATION:
                raise DomainError("distinct zeros closer than 1e-12; pass them as one zero with multiplicity")
        object.__setattr__(self, "zeros", tuple(merged.items()))
        object.__setattr__(self, "rotation", float(self.rotation))

    @classmethod
    def from_zeros(cls, zeros, rotation=0.0):
        """Build from a flat list of zeros, repeated entries meaning multiplicity."""
        return cls(tuple((z, 1) for z in zeros), rotation)

    @property
    def degree(self):
        return sum(m for _, m in self.zeros)

    @property
    def points(self):
        return np.array([a for a, _ in self.zeros], dtype=complex)

    @property
    def multiplicities(self):
        return np.array([m for _, m in self.zeros], dtype=int)

    @property
    def unit(self):
        return complex(math.cos(self.rotation), math.sin(self.rotation))

    def __call__(self, z):
        z = _as_complex(z)
        value = self.unit * np.ones_like(z)
        for a, m in self.zeros:
            value = value * ((z - a) / (1.0 - a.conjugate() * z)) ** m
        return value

    def deriv(self, z):
        z = _as_complex(z)
        factors = [(z - a) / (1.0 - a.conjugate() * z) for a, _ in self.zeros]
        dfactors = [(1.0 - abs(a) ** 2) / (1.0 - a.conjugate() * z) ** 2 for a, _ in self.zeros]
        total = 0.0 * np.ones_like(z)
        for k, (_, m) in enumerate(self.zeros):
            term = m * factors[k] ** (m - 1) * dfactors[k]
            for j, (_, mj) in enumerate(self.zeros):
                if j != k:
                    term = term * factors[j] ** mj
            total = total + term
        return self.unit * total

    def abs_deriv_on_circle(self, zeta):
        """|B'(ζ)| for |ζ| = 1, via the positive sum Σ m (1-|a|²)/|ζ-a|²."""
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros(zeta.shape)
        for a, m in self.zeros:
            out += m * (1.0 - abs(a) ** 2) / np.abs(zeta - a) ** 2
        return out

    def log_derivative_numerator(self):
        """Polynomial N with B'/B = N / prod_k (z - a_k)(1 - conj(a_k) z).

        Degree at most 2K - 2 for K distinct zeros (coefficients, highest first).
        """
        quads = [np.array([-a.conjugate(), 1.0 + abs(a) ** 2, -a]) for a, _ in self.zeros]
        total = np.zeros(1, dtype=complex)
        for k, (a, m) in enumerate(self.zeros):
            term = np.array([m * (1.0 - abs(a) ** 2)], dtype=complex)
            for j, q in enumerate(quads):
                if j != k:
                    term = np.polymul(term, q)
            total = np.polyadd(total, term)
        return total

    def to_inner(self):
        return InnerFunctionRep(blaschke=self)

    def to_dict(self):
        return {"zeros": [{"re": a.real, "im": a.imag, "mult": m} for a, m in self.zeros],
                "rotation": self.rotation}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple((complex(z["re"], z["im"]), z.get("mult", 1)) for z in data["zeros"]),
                   data.get("rotation", 0.0))


@dataclass(frozen=True)
class SingularAtomicInner:
    """exp(-Σ_j m_j (ζ_j + z)/(ζ_j - z)) with atoms ζ_j = e^{i θ_j}.

    ``atoms`` is a tuple of (theta, mass) pairs.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = []
        for theta, mass in self.atoms:
            if mass <= 0:
                raise DomainError(f"singular atom masses must be positive, got {mass}")
            atoms.append((float(theta) % (2 * math.pi), float(mass)))
        if not atoms:
            raise DomainError("singular factor needs at least one atom")
        object.__setattr__(self, "atoms", tuple(sorted(atoms)))

    @property
    def locations(self):
        return np.array([complex(math.cos(t), math.sin(t)) for t, _ in self.atoms])

    def _check(self, z):
        gaps = np.abs(np.asarray(z)[..., None] - self.locations)
        if np.any(gaps < 1e-15):
            raise DomainError("evaluation at a singular atom")

    def exponent(self, z):
        """The Herglotz integral H(z) = Σ m (ζ+z)/(ζ-z); S = exp(-H)."""
        z = _as_complex(z)
        self._check(z)
        total = 0.0 * np.ones_like(z)
        for (_, mass), zeta in zip(self.atoms, self.locations):
            total = total + mass * (zeta + z) / (zeta - z)
        return total

    def __call__(self, z):
        return np.exp(-self.exponent(z))

    def deriv(self, z):
        z = _as_complex(z)
        self._check(z)
        dexp = 0.0 * np.ones_like(z)
        for (_, mass), zeta in zip(self.atoms, self.locations):
            dexp = dexp + mass * 2.0 * zeta / (zeta - z) ** 2
        return -dexp * self(z)

    def log_abs(self, z):
        """log|S(z)| = -P_σ(z), exact even where |S| underflows."""
        return -np.real(self.exponent(z))

    def to_dict(self):
        return {"atoms": [{"theta": t, "mass": m} for t, m in self.atoms]}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple((a["theta"], a["mass"]) for a in data["atoms"]))


@dataclass(frozen=True)
class InnerFunctionRep:
    """post ∘ (B · S); either factor may be absent but not both."""

    blaschke: BlaschkeProduct | None = None
    singular: SingularAtomicInner | None = None
    post: Moebius = field(default_factory=Moebius)

    def __post_init__(self):
        if self.blaschke is None and self.singular is None:
            raise DomainError("InnerFunctionRep needs a Blaschke or a singular factor")

    def _inner(self, z):
        value = 1.0 + 0.0 * z
        if self.blaschke is not None:
            value = value * self.blaschke(z)
        if self.singular is not None:
            value = value * self.singular(z)
        return value

    def _inner_deriv(self, z):
        if self.blaschke is None:
            return self.singular.deriv(z)
        if self.singular is None:
            return self.blaschke.deriv(z)
        return self.blaschke.deriv(z) * self.singular(z) + self.blaschke(z) * self.singular.deriv(z)

    def __call__(self, z):
        return self.post(self._inner(z))

    def deriv(self, z):
        return self.post.deriv(self._inner(z)) * self._inner_deriv(z)

    def to_dict(self):
        out = {"post": self.post.to_dict()}
        if self.blaschke is not None:
            out.update(self.blaschke.to_dict())
        if self.singular is not None:
            out["singular_atoms"] = self.singular.to_dict()["atoms"]
        return out

    @classmethod
    def from_dict(cls, data):
        """Accepts the InnerFunctionRep layout or a bare Blaschke product."""
        blaschke = BlaschkeProduct.from_dict(data) if data.get("zeros") else None
        singular = None
        if data.get("singular_atoms"):
            singular = SingularAtomicInner.from_dict({"atoms": data["singular_atoms"]})
        post = Moebius.from_dict(data["post"]) if "post" in data else Moebius()
        return cls(blaschke, singular, post)


def _check_closed_disk(z):
    if np.any(np.abs(z) > 1.0 + CIRCLE_TOL):
        raise DomainError("evaluation point outside the closed unit disk")


def _as_rep(F):
    if isinstance(F, BlaschkeProduct):
        return F.to_inner()
    return F


def eval(F, z):  # noqa: A001 - mirrors the operation name
    """F(z) for |z| <= 1 (F a BlaschkeProduct or InnerFunctionRep)."""
    z = _as_complex(z)
    _check_closed_disk(z)
    return _as_rep(F)(z)


def deriv(F, z):
    z = _as_complex(z)
    _check_closed_disk(z)
    return _as_rep(F).deriv(z)


def critical_points(B: BlaschkeProduct):
    """Critical points of B in the disk as a list of (point, multiplicity).

    A zero of multiplicity m is a critical point of multiplicity m - 1; the
    remaining critical points are the interior roots of the numerator of B'/B,
    found by Aberth iteration. Their reflections 1/conj(c) must show up among
    the exterior roots.
    """
    if B.degree < 2:
        raise DomainError("critical points need degree >= 2")
    found = [(a, m - 1) for a, m in B.zeros if m >= 2]
    if len(B.zeros) >= 2:
        numerator = B.log_derivative_numerator()
        roots = aberth(numerator)
        inside = roots[np.abs(roots) < 1.0 - INTERIOR_ROOT_MARGIN]
        outside = roots[np.abs(roots) >= 1.0 - INTERIOR_ROOT_MARGIN]
        expected = len(B.zeros) - 1
        residuals = np.abs(np.polyval(numerator, roots))
        if inside.size != expected:
            raise RootFindingError(
                f"expected {expected} interior roots of the log-derivative numerator, found {inside.size}",
                residuals=residuals,
            )
        centers, sizes = cluster_multiple(inside, CLUSTER_TOL, coeffs=numerator)
        mirrors, _ = cluster_multiple(outside, CLUSTER_TOL) if outside.size else (outside, None)
        for c, s in zip(centers, sizes):
            if abs(c) < 1e-8:
                continue  # reflection sits at infinity, i.e. a dropped leading term
            mirror = 1.0 / c.conjugate()
            tol = max(1e-6, 3.0 * 1e-15 ** (1.0 / s)) * max(1.0, abs(mirror)) ** 2
            if mirrors.size == 0 or np.min(np.abs(mirrors - mirror)) > tol:
                raise RootFindingError(
                    f"reflected root 1/conj(c) missing for c={c}", residuals=residuals
                )
        centers = np.array(
            [_polish_on_log_derivative(B, c) if s == 1 else c for c, s in zip(centers, sizes)]
        )
        found.extend(zip(centers.tolist(), sizes.tolist()))
        _check_vanishing(B, centers)
    return [(complex(c), int(m)) for c, m in found]


def _log_derivative_terms(B, z):
    return [m * (1.0 - abs(a) ** 2) / ((z - a) * (1.0 - a.conjugate() * z)) for a, m in B.zeros]


def _polish_on_log_derivative(B, c, steps=3):
    # Newton on the rational B'/B directly; better conditioned than the
    # expanded numerator when zeros cluster.
    for _ in range(steps):
        value = 0j
        slope = 0j
        for a, m in B.zeros:
            w = m * (1.0 - abs(a) ** 2)
            q = (c - a) * (1.0 - a.conjugate() * c)
            value += w / q
            slope -= w * (1.0 + abs(a) ** 2 - 2.0 * a.conjugate() * c) / q**2
        if slope == 0 or value == 0:
            break
        c = c - value / slope
    return c


def _check_vanishing(B, centers):
    for c in centers:
        terms = _log_derivative_terms(B, c)
        scale = sum(abs(t) for t in terms)
        if abs(sum(terms)) > 1e-8 * scale:
            raise RootFindingError(
                f"critical point {c} fails |B'| < 1e-8 * local scale", residuals=np.array([abs(sum(terms))])
            )


def inner_part_of_derivative(B: BlaschkeProduct) -> BlaschkeProduct:
    """The Blaschke product whose zeros are the critical points of B."""
    return BlaschkeProduct(tuple(critical_points(B)))


def _atom_weight(c, mult, green_weights):
    if green_weights:
        if c == 0:
            raise DomainError("Green weight log(1/|c|) is infinite at c = 0")
        return mult * math.log(1.0 / abs(c))
    return mult * (1.0 - abs(c))


def mu_of(B: BlaschkeProduct, green_weights: bool = False):
    """Critical structure Σ mult (1 - |c|) δ_c (or Green weights log 1/|c|)."""
    from .measures import DiskMeasure

    return DiskMeasure(tuple((c, _atom_weight(c, m, green_weights)) for c, m in critical_points(B)))


def nu_of(B: BlaschkeProduct, green_weights: bool = False):
    """Critical value measure: the masses of mu_of(B) moved to B(c)."""
    from .measures import DiskMeasure

    return DiskMeasure(
        tuple((complex(B(c)), _atom_weight(c, m, green_weights)) for c, m in critical_points(B))
    )


def entropy(B: BlaschkeProduct, quadrature_n: int = 4096) -> float:
    """∫ log|B'| dm over the circle by the trapezoidal rule on n nodes."""
    if quadrature_n < 64:
        raise DomainError("quadrature_n must be at least 64")
    if np.any(1.0 - np.abs(B.points) < 1e-6):
        warnings.warn("a zero lies within 1e-6 of the circle; quadrature is inaccurate", AccuracyWarning)
    theta = 2.0 * np.pi * np.arange(quadrature_n) / quadrature_n
    values = np.log(B.abs_deriv_on_circle(np.exp(1j * theta)))
    return float(values.mean())


def lambda_metric(F, z) -> float:
    """Pullback of the hyperbolic metric, 2|F'(z)| / (1 - |F(z)|²)."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError("lambda_metric needs an interior point")
    F = _as_rep(F)
    value = F(z)
    gap = 1.0 - abs(value) ** 2
    if gap <= 0.0:
        raise DomainError(f"|F(z)| >= 1 numerically at z={z}")
    return 2.0 * abs(F.deriv(z)) / gap


def green_disk(p, z) -> float:
    """G_𝔻(p, z) = log|1 - conj(p) z| - log|z - p|."""
    p, z = complex(p), complex(z)
    if p == z:
        raise DomainError("Green's function is singular at coincident points")
    return math.log(abs(1.0 - p.conjugate() * z)) - math.log(abs(z - p))


def jensen_residual(B: BlaschkeProduct, z, quadrature_n: int = 4096) -> float:
    """|log|B'(z)| - (∫ log|B'| dω_z - Σ mult G_𝔻(z, c))|."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError("jensen_residual needs an interior point")
    crit = critical_points(B)
    if any(abs(z - c) < 1e-8 for c, _ in crit):
        raise DomainError("z is (numerically) a critical point; log|B'(z)| is singular")
    lhs = math.log(abs(B.deriv(z)))
    theta = 2.0 * np.pi * np.arange(quadrature_n) / quadrature_n
    zeta = np.exp(1j * theta)
    poisson = (1.0 - abs(z) ** 2) / np.abs(zeta - z) ** 2
    boundary = float(np.mean(np.log(B.abs_deriv_on_circle(zeta)) * poisson))
    rhs = boundary - sum(m * green_disk(z, c) for c, m in crit)
    return abs(lhs - rhs)


def frostman_shift(F, a) -> InnerFunctionRep:
    """(F - a) / (1 - conj(a) F), folded into the post-composition."""
    a = complex(a)
    if not abs(a) < 1.0:
        raise DomainError("Frostman shift needs |a| < 1")
    F = _as_rep(F)
    return InnerFunctionRep(F.blaschke, F.singular, Moebius(a).compose(F.post))


def compose_moebius(m: Moebius, B: BlaschkeProduct) -> BlaschkeProduct:
    """The Blaschke product m ∘ B, with zeros B^{-1}(m^{-1}(0))."""
    numer = np.array([1.0 + 0j])
    denom = np.array([1.0 + 0j])
    for a, mult in B.zeros:
        for _ in range(mult):
            numer = np.polymul(numer, [1.0, -a])
            denom = np.polymul(denom, [-a.conjugate(), 1.0])
    target = m.inverse()(0.0)
    target = complex(target)
    poly = np.polysub(B.unit * numer, target * np.pad(denom, (numer.size - denom.size, 0)))
    zeros = aberth(poly)
    if np.any(np.abs(zeros) >= 1.0):
        raise RootFindingError("composition produced a zero outside the disk", residuals=np.abs(zeros))
    centers, sizes = cluster_multiple(zeros, CLUSTER_TOL, coeffs=poly)
    probe = 0.3 + 0.1j
    while np.min(np.abs(centers - probe)) < 1e-3:
        probe *= 0.5
    unrotated = BlaschkeProduct(tuple(zip(centers.tolist(), sizes.tolist())))
    ratio = complex(m(B(probe))) / complex(unrotated(probe))
    return BlaschkeProduct(unrotated.zeros, math.atan2(ratio.imag, ratio.real))


def motivating_family(n: int) -> BlaschkeProduct:
    """((z - c_n)/(1 - c_n z))^{n+1} with c_n = -1 + 1/n."""
    if n < 1:
        raise DomainError("motivating family is indexed by n >= 1")
    c = -1.0 + 1.0 / n
    return BlaschkeProduct(((complex(c), n + 1),))


def motivating_limit() -> InnerFunctionRep:
    """exp((z - 1)/(z + 1)) = S_σ with σ = δ_{-1}."""
    return InnerFunctionRep(singular=SingularAtomicInner(((math.pi, 1.0),)))


def random_blaschke(rng, degree, max_modulus=0.9):
    """Degree-d product with zeros uniform (by area) in |z| <= max_modulus."""
    r = max_modulus * np.sqrt(rng.uniform(size=degree))
    t = rng.uniform(0.0, 2.0 * np.pi, size=degree)
    return BlaschkeProduct.from_zeros(r * np.exp(1j * t), rotation=rng.uniform(0.0, 2.0 * np.pi))
