"""Closed-form conformal maps for half-disk fixtures.

The upper half-disk goes to the upper half-plane by s = ((1 + u)/(1 - u))²;
the diameter lands on the positive axis and the arc on the negative axis.
The right half-disk is reduced to it by u = i z.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import DomainError
from ..thickness import MapOracle


def upper_half_disk_to_plane(u):
    u = np.asarray(u, dtype=complex)
    return ((1.0 + u) / (1.0 - u)) ** 2


def plane_to_upper_half_disk(s):
    root = np.sqrt(np.asarray(s, dtype=complex))  # principal branch: first quadrant for s in H
    return (root - 1.0) / (root + 1.0)


def diameter_harmonic_measure(w):
    """ω(diameter) seen from w in the upper half-disk, 1 - arg(s)/π."""
    s = complex(upper_half_disk_to_plane(w))
    if not (abs(w) < 1.0 and w.imag > 0.0):
        raise DomainError(f"{w} is not inside the upper half-disk")
    return 1.0 - cmath.phase(s) / math.pi


class _HalfDiskMap:
    """ψ: right half-disk → 𝔻 with ψ(p) = p and ψ(1) = 1 (p real in (0, 1))."""

    def __init__(self, p=0.5):
        p = complex(p)
        if not (0.0 < p.real < 1.0 and p.imag == 0.0):
            raise DomainError("base point must be real in (0, 1)")
        self.p = p
        self.s0 = complex(upper_half_disk_to_plane(1j * p))
        w1 = self._cayley(complex(upper_half_disk_to_plane(1j)))
        # λ makes the final Möbius carry ψ̃(1) to 1.
        self.lam = ((1.0 - p) / (1.0 - p.conjugate())) / w1

    def _cayley(self, s):
        return (s - self.s0) / (s - self.s0.conjugate())

    def _outer(self, w):
        v = self.lam * w
        return (v + self.p) / (1.0 + self.p.conjugate() * v)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self._outer(self._cayley(upper_half_disk_to_plane(1j * z)))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        u = 1j * z
        q = (1.0 + u) / (1.0 - u)
        s = q * q
        ds_du = 2.0 * q * 2.0 / (1.0 - u) ** 2
        dc_ds = (self.s0 - self.s0.conjugate()) / (s - self.s0.conjugate()) ** 2
        v = self.lam * self._cayley(s)
        dm_dv = (1.0 - abs(self.p) ** 2) / (1.0 + self.p.conjugate() * v) ** 2
        return dm_dv * self.lam * dc_ds * ds_du * 1j

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        v = (w - self.p) / (1.0 - self.p.conjugate() * w)
        c = v / self.lam
        s = (self.s0 - self.s0.conjugate() * c) / (1.0 - c)
        return -1j * plane_to_upper_half_disk(s)


def half_disk_oracle(p=0.5):
    """MapOracle for ψ = φ⁻¹ on the right half-disk, normalized by ψ(p) = p, ψ(1) = 1.

    ``base_point`` is φ(0) = ψ⁻¹(0), where walks for the pushforward start.
    """
    psi = _HalfDiskMap(p)

    def boundary(theta):
        theta = math.remainder(theta, 2.0 * math.pi)
        if abs(theta) >= math.pi / 2:
            return None
        return complex(psi(cmath.exp(1j * theta)))

    return MapOracle(psi, domain="right_half_disk", derivative=psi.deriv, boundary=boundary,
                     base_point=complex(psi.inverse(0.0)), name=f"right_half_disk(p={p})",
                     meta={"inverse": psi.inverse, "p": complex(p)})


def half_disk_green(p, z, side="right"):
    """G_Ω(p, z) for a half-disk by conformal invariance."""
    rot = 1j if side == "right" else 1.0
    sp, sz = (complex(upper_half_disk_to_plane(rot * w)) for w in (p, z))
    # Green's function of the upper half-plane.
    return math.log(abs(sz - sp.conjugate()) / abs(sz - sp))
