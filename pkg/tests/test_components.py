import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from innerlab import components as cp
from innerlab import mobius_blaschke as mb
from innerlab.components import RoundDisk
from innerlab.errors import DomainError, ValidationError

Z2 = mb.BlaschkeProduct(((0j, 2),))


def riemann_hurwitz(comps):
    for c in comps:
        assert c.degree == 1 + c.critical_multiplicity
        assert c.is_simple
        if c.degree == 1:
            assert not c.critical_points_inside


def test_z2_small_disk_two_islands():
    V = RoundDisk(0.5, 0.1)
    comps = cp.preimage_components(Z2, V)
    assert sorted(c.degree for c in comps) == [1, 1]
    riemann_hurwitz(comps)
    for c in comps:
        assert V.contains(Z2(c.interior_point))
        assert cp.degree(Z2, c, V) == 1


def test_z2_centered_disk_one_component():
    V = RoundDisk(0, 0.25)
    (c,) = cp.preimage_components(Z2, V)
    assert c.degree == 2 and cp.degree(Z2, c, V) == 2
    assert c.critical_points_inside[0][1] == 1 and abs(c.critical_points_inside[0][0]) < 1e-12
    assert np.abs(np.abs(c.boundary) - 0.5).max() < 2e-3
    assert c.polygon.area == pytest.approx(math.pi / 4, rel=1e-2)
    riemann_hurwitz([c])


def test_motivating_family_component():
    F = mb.motivating_family(4)
    (c,) = cp.preimage_components(F, RoundDisk(0, 0.1))
    assert c.degree == 5
    (point, mult), = c.critical_points_inside
    assert point == pytest.approx(-0.75) and mult == 4
    riemann_hurwitz([c])


def test_degree_conservation():
    F = mb.motivating_family(6)
    V = RoundDisk(0.5, 0.05)
    comps = cp.preimage_components(F, V)
    assert sum(c.degree for c in comps) == F.degree
    assert all(c.degree == 1 for c in comps)
    riemann_hurwitz(comps)


@settings(max_examples=6)
@given(st.integers(0, 2**31), st.integers(2, 4))
def test_random_products_conserve_degree(seed, d):
    B = mb.random_blaschke(np.random.default_rng(seed), d, max_modulus=0.7)
    V = RoundDisk(complex(B(0.1j)), 0.05)
    try:
        comps = cp.preimage_components(B, V)
    except DomainError:
        return  # ∂V near a critical value: the documented refusal
    riemann_hurwitz(comps)
    if not any(c.touches_circle for c in comps):
        assert sum(c.degree for c in comps) == d


def test_margin_violation_asks_for_perturbation():
    with pytest.raises(DomainError, match="perturb the radius"):
        cp.preimage_components(Z2, RoundDisk(0.3, 0.3 + 1e-4))


def test_input_validation():
    with pytest.raises(ValidationError):
        RoundDisk(0.5, 0.6)
    with pytest.raises(ValidationError):
        RoundDisk(0, -0.1)
    with pytest.raises(ValidationError):
        cp.preimage_components(Z2, RoundDisk(0.5, 0.1), grid_res=256)
    assert RoundDisk.parse("0.5,0,0.1") == RoundDisk(0.5, 0.1)


def test_island_reports():
    good = cp.island_classify(Z2, RoundDisk(0.5, 0.1))
    assert good.simple_islands and good.distance_to_critical_values == pytest.approx(0.4)
    bad = cp.island_classify(Z2, RoundDisk(0, 0.25))
    assert not bad.simple_islands and bad.distance_to_critical_values == 0.0
    assert max(c.degree for c in bad.per_component) >= 2
    F6 = cp.island_classify(mb.motivating_family(6), RoundDisk(0.5, 0.05))
    assert F6.simple_islands and F6.distance_to_critical_values > 0
    assert F6.to_dict()["simple_islands"] is True


def test_escaping_green_sum_examples():
    V = RoundDisk(0, 0.5)
    assert cp.escaping_green_sum("motivating", 100, V, split_radius=0.9) == pytest.approx(
        100 * math.log(1 / 0.99), rel=1e-12)
    assert cp.escaping_green_sum("motivating", 100, RoundDisk(0.5, 0.2)) == 0.0
    values = [cp.escaping_green_sum("motivating", n, V) for n in (10, 100, 1000)]
    assert values[0] > values[1] > values[2] > 1
    for n, v in zip((10, 100, 1000), values):
        assert abs(v - 1) <= 2 / n
        assert v == pytest.approx(n * math.log(1 / (1 - 1 / n)), rel=1e-9)
    with pytest.raises(ValidationError):
        cp.escaping_green_sum("motivating", 10, V, split_radius=1.0)


def test_split_is_strict():
    # |c_10| = 0.9 exactly, so a split at 0.9 leaves it non-escaping
    assert cp.escaping_green_sum("motivating", 10, RoundDisk(0, 0.5), split_radius=0.9) == 0.0


def test_winding_number_of_circle():
    t = np.linspace(0, 2 * np.pi, 65)[:-1]
    assert cp.winding_number(Z2, RoundDisk(0, 0.25), 0.6 * np.exp(1j * t)) == pytest.approx(2.0, abs=1e-9)
