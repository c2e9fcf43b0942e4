import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from innerlab import harmonic as hm
from innerlab import thickness as th
from innerlab.errors import DomainError, ValidationError
from innerlab.harmonic import BoundaryPartition, PolylineJordanDomain
from innerlab.measures import CircleMeasure, poisson_extension, poisson_kernel

DISK = hm.disk_polygon()
RIGHT = hm.right_half_disk()
UPPER = hm.upper_half_disk()
point = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0.0, 0.9), st.floats(0, 2 * math.pi))


# domains

def test_domain_validation():
    with pytest.raises(ValidationError):
        PolylineJordanDomain(np.array([0, 0.5, 0.5j])[::-1])  # clockwise
    with pytest.raises(ValidationError):
        PolylineJordanDomain(np.array([0, 0.5 + 0.5j, 0.5, 0.5j]))  # bow tie
    with pytest.raises(ValidationError):
        PolylineJordanDomain(np.array([0, 1.5, 1.5j]))


def test_circle_arcs_recorded():
    assert RIGHT.circle_segments.sum() == 500
    assert RIGHT.touches_circle_at(0.0) and not RIGHT.touches_circle_at(math.pi)
    assert np.array_equal(RIGHT.on_circle_part(np.array([0.0, math.pi])), [True, False])
    assert hm.cusp_domain().touches_circle_at(0.0)
    assert not hm.cusp_domain().on_circle_part(0.0)


def test_domain_round_trip():
    again = PolylineJordanDomain.from_dict(RIGHT.to_dict())
    assert np.array_equal(again.vertices, RIGHT.vertices)
    parts = BoundaryPartition.circle_vs_rest(RIGHT)
    assert np.array_equal(BoundaryPartition.from_dict(parts.to_dict()).segment_part, parts.segment_part)


# walk on spheres

def test_wos_disk_arc():
    parts = BoundaryPartition.by_angle(DISK, 0.0, math.pi / 2)
    est = hm.wos_harmonic_measure(DISK, 0j, parts, 200_000, seed=3)
    assert abs(est.estimates[0] - 0.25) < 3 * est.sigmas[0]
    assert sum(est.estimates) == 1.0


def test_wos_square_sides():
    sq = hm.square(per_side=25)
    est = hm.wos_harmonic_measure(sq, 0j, BoundaryPartition.by_direction(sq), 100_000, seed=1)
    for p, s in zip(est.estimates, est.sigmas):
        assert abs(p - 0.25) < 3.5 * s


def test_wos_half_disk_against_map():
    w = 0.5j
    parts = BoundaryPartition.circle_vs_rest(UPPER)
    est = hm.wos_harmonic_measure(UPPER, w, parts, 100_000, seed=7)
    exact = hm.diameter_harmonic_measure(w)
    assert 0 < exact < 1
    assert abs(est.estimates[1] - exact) / exact < 0.02


def test_wos_reproducible_and_validated():
    parts = BoundaryPartition.by_angle(DISK, 0.0, 1.0)
    a = hm.wos_harmonic_measure(DISK, 0.3, parts, 10_000, seed=11)
    b = hm.wos_harmonic_measure(DISK, 0.3, parts, 10_000, seed=11)
    assert a == b
    with pytest.raises(DomainError):
        hm.wos_harmonic_measure(DISK, 1.2, parts, 10_000)
    with pytest.raises(DomainError):
        hm.wos_harmonic_measure(DISK, 1.0, parts, 10_000)
    with pytest.raises(ValidationError):
        hm.wos_harmonic_measure(DISK, 0.0, parts, 100)


def test_walks_exit_on_the_boundary():
    res = hm.run_walks(RIGHT, 0.4 + 0.1j, 20_000, seed=2)
    assert res.capped == 0
    assert np.all(RIGHT.distance_to_boundary(res.exits) < 1e-5)


# Green's functions

def test_green_disk_examples():
    assert hm.green_disk(0, 0.5) == pytest.approx(math.log(2))
    assert hm.green_disk(0.3, 0.7) == pytest.approx(math.log(0.79 / 0.4))


@given(point, point)
def test_green_disk_symmetric_positive(p, z):
    if abs(p - z) > 1e-6:
        g = hm.green_disk(p, z)
        assert g > 0
        assert abs(g - hm.green_disk(z, p)) < 1e-12


@given(point, point, st.floats(0, 2 * math.pi))
def test_green_ratio_tends_to_poisson_ratio(p, q, t):
    zeta = complex(math.cos(t), math.sin(t))
    r = 1 - 1e-4
    ratio = hm.green_disk(p, r * zeta) / hm.green_disk(q, r * zeta)
    assert ratio == pytest.approx(poisson_kernel(zeta, p) / poisson_kernel(zeta, q), rel=1e-2)


def test_green_grid_disk_fixture():
    assert hm.green_grid(DISK, 0, 0.5, 1 / 200) == pytest.approx(math.log(2), rel=2e-2)


def test_green_grid_half_disk_fixture():
    value = hm.green_grid(UPPER, 0.5j, 0.25j, 1 / 200)
    assert value == pytest.approx(hm.half_disk_green(0.5j, 0.25j, side="upper"), rel=2e-2)
    value = hm.green_grid(RIGHT, 0.5, 0.5 + 0.25j, 1 / 200)
    assert value == pytest.approx(hm.half_disk_green(0.5, 0.5 + 0.25j), rel=2e-2)


def test_green_grid_symmetry_positivity_monotonicity():
    inner = hm.radial_graph_domain(lambda t: 0.2 + 0.05 * np.cos(3 * t))
    p, z = 0.1 + 0.2j, -0.3 + 0.1j
    for omega in (inner, DISK):
        a, b = hm.green_grid(omega, p, z, 1 / 200), hm.green_grid(omega, z, p, 1 / 200)
        assert a > 0 and a == pytest.approx(b, rel=2e-2)
    assert hm.green_grid(inner, p, z, 1 / 200) <= 1.02 * hm.green_grid(DISK, p, z, 1 / 200)
    assert hm.green_grid(RIGHT, 0.5, 0.6j + 0.1, 1 / 200) <= 1.02 * hm.green_disk(0.5, 0.6j + 0.1)


def test_green_grid_errors():
    with pytest.raises(DomainError):
        hm.green_grid(DISK, 0, 0.01, 1 / 200)
    with pytest.raises(DomainError):
        hm.green_grid(DISK, 0, 1.5, 1 / 200)


# Green quotient profiles

def test_quotient_profile_disk_is_one():
    prof = hm.green_quotient_profile(DISK, 0.3j, 0.0, [0.9, 0.99, 0.999])
    assert prof == pytest.approx([1.0] * 3, abs=1e-9)


def test_quotient_profile_thick_half_disk():
    exact = th.angular_derivative_radial(hm.half_disk_oracle(0.5), 0.0)
    assert exact == pytest.approx(8 / 9, rel=1e-6)
    prof = hm.green_quotient_profile(RIGHT, 0.5, 0.0, 1 - np.array([1e-1, 1e-2, 1e-3]))
    assert abs(prof[-1] - exact) / exact < 0.05


def test_quotient_profile_thin_cusp():
    cusp = hm.cusp_domain()
    prof = hm.green_quotient_profile(cusp, 0.0, 0.0, 1 - np.array([1e-1, 1e-2, 1e-3]))
    assert prof[-1] < 0.05
    assert prof[0] > prof[1] > prof[2] > 0
    n = 1 << 14
    theta = 2 * np.pi * np.arange(n) / n
    h = np.minimum(np.abs(np.exp(1j * theta) - 1), 0.5)
    assert th.disk_thickness_integral(h, 0.0) == math.inf


def test_quotient_profile_rejects_interior_zeta():
    with pytest.raises(DomainError):
        hm.green_quotient_profile(RIGHT, 0.5, math.pi, [0.9])


# composition operator on measures

def test_clark_identity():
    mu = CircleMeasure(((1.0, 0.5),), (0.2, 0.4, 0.1, 0.3))
    res = hm.clark_pushforward(DISK, th.identity_oracle(), mu)
    assert res.n_walks == 0 and not res.interior.atoms
    assert res.boundary.atoms == mu.atoms
    assert res.boundary.density == pytest.approx(mu.density, abs=1e-12)


@given(point, st.floats(0, 2 * math.pi))
@settings(max_examples=20)
def test_clark_moebius_fixture(a, x):
    oracle = th.moebius_oracle(a)
    mu = CircleMeasure(((x, 1.0),), (0.5, 1.5, 0.25))
    res = hm.clark_pushforward(DISK, oracle, mu)
    (theta, mass), = res.boundary.atoms
    zeta = complex(math.cos(x), math.sin(x))
    assert mass == pytest.approx(abs(oracle.derivative(zeta)), rel=1e-6)
    assert mass == pytest.approx(poisson_kernel(zeta, a), rel=1e-6)
    assert res.total == pytest.approx(poisson_extension(mu, a, rule="exact"), rel=1e-6)


def test_clark_half_disk_fixture():
    oracle = hm.half_disk_oracle(0.5)
    res = hm.clark_pushforward(RIGHT, oracle, CircleMeasure.dirac(0.0), n_walks=200_000, seed=4)
    (theta, mass), = res.boundary.atoms
    assert theta == 0.0 and mass == pytest.approx(8 / 9, rel=1e-6)
    assert res.interior.total_mass > 0
    assert res.within_3_sigma


def test_clark_without_oracle():
    res = hm.clark_pushforward(RIGHT, None, CircleMeasure.dirac(0.0), n_walks=10_000, base_point=0.3)
    assert res.boundary is None and res.boundary_status == "unavailable"
    with pytest.raises(DomainError):
        hm.clark_pushforward(RIGHT, None, CircleMeasure.dirac(0.0))


# half-disk map oracle

@given(st.floats(0.05, 0.95), st.floats(-1.4, 1.4))
def test_half_disk_map_round_trip(r, t):
    psi = hm.half_disk_oracle(0.5)
    z = r * complex(math.cos(t), math.sin(t))
    w = psi(z)
    assert abs(w) < 1
    assert abs(psi.meta["inverse"](w) - z) < 1e-9
    h = 1e-6
    fd = (psi(z + h) - psi(z - h)) / (2 * h)
    assert abs(fd - psi.derivative(z)) < 1e-5 * max(1.0, abs(fd))
