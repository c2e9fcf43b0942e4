import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from innerlab import mobius_blaschke as mb
from innerlab.errors import DomainError
from innerlab.mobius_blaschke import BlaschkeProduct, InnerFunctionRep, Moebius, SingularAtomicInner

from conftest import disk_samples

S = mb.motivating_limit()


def zpow(d):
    return BlaschkeProduct(((0j, d),))


points = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)),
                   st.floats(0.0, 0.95), st.floats(0.0, 2 * math.pi))


def blaschke_strategy(max_degree=6, max_modulus=0.9):
    # distinct zeros stay 1e-3 apart; closer ones are a multiple zero to the root finder
    radius = st.one_of(st.just(0.0), st.floats(0.01, max_modulus))
    zero = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), radius, st.floats(0.0, 2 * math.pi))
    zeros = st.lists(zero, min_size=2, max_size=max_degree).filter(
        lambda zs: all(abs(a - b) > 1e-3 or a == b for i, a in enumerate(zs) for b in zs[:i]))
    return st.builds(BlaschkeProduct.from_zeros, zeros, st.floats(0.0, 2 * math.pi))


# eval / deriv examples

def test_eval_examples():
    assert mb.eval(zpow(2), 0.5) == pytest.approx(0.25, abs=1e-15)
    assert mb.eval(S, 0) == pytest.approx(math.exp(-1), rel=1e-14)
    assert abs(mb.eval(S, -0.9)) == pytest.approx(math.exp(-19), rel=1e-12)


def test_deriv_examples():
    assert mb.deriv(zpow(2), 0.5) == pytest.approx(1.0)
    assert mb.deriv(BlaschkeProduct(((0.5, 1),)), 0) == pytest.approx(0.75)
    assert mb.deriv(S, 0) == pytest.approx(2 * math.exp(-1), rel=1e-13)


def test_eval_at_singular_atom_is_domain_error():
    with pytest.raises(DomainError):
        mb.eval(S, -1.0)


def test_zero_outside_disk_rejected():
    with pytest.raises(DomainError):
        BlaschkeProduct(((1.2, 1),))
    with pytest.raises(DomainError):
        BlaschkeProduct.from_zeros([0.0, 1e-300])
    with pytest.raises(DomainError):
        Moebius(1.0)


@given(blaschke_strategy(), st.floats(0.0, 2 * math.pi))
def test_unimodular_on_circle(B, t):
    assert abs(abs(mb.eval(B, complex(math.cos(t), math.sin(t)))) - 1.0) < 1e-10


@given(blaschke_strategy(), points)
def test_deriv_matches_central_difference(B, z):
    h = 1e-6
    fd = (B(z + h) - B(z - h)) / (2 * h)
    d = mb.deriv(B, z)
    assert abs(fd - d) <= 1e-5 * max(abs(d), 1e-3)


def test_singular_inner_radial_limits():
    r = 1 - np.geomspace(1e-2, 1e-6, 5)
    assert np.all(np.abs(S(0.999 * np.exp(1j * np.linspace(-2, 2, 9)))) < 1)
    assert abs(abs(S(r[-1] * 1j)) - 1) < 1e-5
    assert np.all(np.diff(S.singular.log_abs(-r)) < 0)


# Moebius algebra

@given(points, st.floats(0, 2 * math.pi), points, st.floats(0, 2 * math.pi), points)
def test_moebius_compose_and_inverse(a, s, b, t, z):
    m, n = Moebius(a, s), Moebius(b, t)
    assert abs(m.compose(n)(z) - m(n(z))) < 1e-9
    assert abs(m.inverse()(m(z)) - z) < 1e-9


# critical points

def test_critical_points_examples():
    (c, m), = mb.critical_points(mb.motivating_family(4))
    assert c == pytest.approx(-0.75, abs=1e-9) and m == 4
    (c, m), = mb.critical_points(zpow(3))
    assert abs(c) < 1e-9 and m == 2


def test_critical_point_of_two_zero_product():
    # B = z (z - a)/(1 - a z), a = 1/2.  B' numerator: -a z^2 + 2 z - a (times a positive factor)
    a = 0.5
    roots = np.roots([-a, 2.0, -a])
    exact = complex(roots[np.abs(roots) < 1][0])
    B = BlaschkeProduct.from_zeros([0.0, a])
    (c, m), = mb.critical_points(B)
    assert m == 1 and abs(c - exact) < 1e-12 and 0 < c.real < a
    (w, mass), = mb.nu_of(B).atoms
    assert abs(w - B(exact)) < 1e-12 and mass == pytest.approx(1 - abs(exact))


@given(st.integers(2, 12), st.integers(0, 2**31))
def test_critical_count_is_degree_minus_one(d, seed):
    B = mb.random_blaschke(np.random.default_rng(seed), d, max_modulus=0.95)
    crit = mb.critical_points(B)
    assert sum(m for _, m in crit) == d - 1
    for c, _ in crit:
        assert abs(c) < 1
        assert abs(B.deriv(c)) < 1e-6


@given(blaschke_strategy(max_degree=5), points, st.floats(0, 2 * math.pi))
def test_critical_points_moebius_invariant(B, a, t):
    m = Moebius(a * 0.9, t)
    before = sorted(mb.critical_points(B), key=lambda cm: (round(cm[0].real, 5), round(cm[0].imag, 5)))
    after = mb.critical_points(mb.compose_moebius(m, B))
    assert sum(k for _, k in after) == sum(k for _, k in before)
    for c, k in before:
        match = [k2 for c2, k2 in after if abs(c2 - c) < 1e-5]
        assert match == [k]
    mass = lambda meas: float(np.sum(meas.masses))
    assert mass(mb.mu_of(B)) == pytest.approx(mass(mb.mu_of(mb.compose_moebius(m, B))), abs=1e-6)


# critical structure

def test_mu_nu_of_motivating_family():
    F = mb.motivating_family(4)
    (c, mass), = mb.mu_of(F).atoms
    assert c == pytest.approx(-0.75) and mass == pytest.approx(1.0, abs=1e-12)
    (w, mass), = mb.nu_of(F).atoms
    assert abs(w) < 1e-12 and mass == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 7])
def test_mu_of_monomial(d):
    (c, mass), = mb.mu_of(zpow(d)).atoms
    assert abs(c) < 1e-12 and mass == pytest.approx(d - 1)


@given(blaschke_strategy())
def test_mass_conservation(B):
    assert mb.nu_of(B).total_mass == mb.mu_of(B).total_mass


def test_green_weights_flag():
    (c, mass), = mb.mu_of(mb.motivating_family(4), green_weights=True).atoms
    assert mass == pytest.approx(4 * math.log(1 / 0.75))
    with pytest.raises(DomainError):
        mb.mu_of(zpow(2), green_weights=True)


def test_inner_part_of_derivative():
    inner = mb.inner_part_of_derivative(zpow(3))
    assert inner.degree == 2
    inner = mb.inner_part_of_derivative(mb.motivating_family(4))
    (a, m), = inner.zeros
    assert a == pytest.approx(-0.75) and m == 4


# entropy

@pytest.mark.parametrize("d", [1, 2, 7, 32])
def test_entropy_of_monomial(d):
    assert abs(mb.entropy(zpow(d)) - math.log(d)) < 1e-10


def test_entropy_of_moebius():
    assert abs(mb.entropy(BlaschkeProduct(((0.5, 1),))) - math.log(0.75)) < 1e-9


def test_entropy_guards():
    with pytest.raises(DomainError):
        mb.entropy(zpow(2), quadrature_n=32)


# metric, Green, Jensen

def test_lambda_metric_examples():
    ident = BlaschkeProduct(((0j, 1),))
    assert mb.lambda_metric(ident, 0.3 + 0.4j) == pytest.approx(2 / (1 - 0.25))
    assert mb.lambda_metric(zpow(2), 0) == 0
    expected = 2 * math.exp(-19) * 2 / 0.01 / (1 - math.exp(-38))
    assert mb.lambda_metric(S, -0.9) == pytest.approx(expected, rel=1e-9)
    assert expected < 1e-5


@given(blaschke_strategy(max_modulus=0.95), st.integers(0, 2**31))
def test_schwarz_pick_and_fundamental_lemma(B, seed):
    inner = mb.inner_part_of_derivative(B)
    for z in disk_samples(np.random.default_rng(seed), 50, 0.98):
        lam = mb.lambda_metric(B, z)
        hyp = 2 / (1 - abs(z) ** 2)
        assert lam <= hyp + 1e-9
        assert lam >= abs(inner(z)) * hyp - 1e-9


def test_schwarz_pick_for_singular_fixture(rng):
    for z in disk_samples(rng, 200, 0.98):
        assert mb.lambda_metric(S, z) <= 2 / (1 - abs(z) ** 2) + 1e-9


def test_green_disk():
    assert mb.green_disk(0, 0.5) == pytest.approx(math.log(2))
    assert mb.green_disk(0.2, 0.7j) == pytest.approx(mb.green_disk(0.7j, 0.2))
    with pytest.raises(DomainError):
        mb.green_disk(0.1, 0.1)


def test_jensen_examples():
    assert mb.jensen_residual(zpow(2), 0.5) < 1e-8
    with pytest.raises(DomainError):
        mb.jensen_residual(zpow(3), 0)
    B = mb.random_blaschke(np.random.default_rng(5), 5)
    assert mb.jensen_residual(B, 0.3 + 0.2j) < 1e-6


# Frostman shift and the family

def test_frostman_shift():
    z = 0.2 - 0.3j
    assert mb.eval(mb.frostman_shift(S, 0), z) == pytest.approx(mb.eval(S, z))
    ident = BlaschkeProduct(((0j, 1),))
    assert mb.eval(mb.frostman_shift(ident, 0.5), z) == pytest.approx((z - 0.5) / (1 - 0.5 * z))
    Fa = mb.frostman_shift(S, 0.3)
    e = math.exp(-1)
    assert mb.eval(Fa, 0) == pytest.approx((e - 0.3) / (1 - 0.3 * e))
    assert np.all(np.abs(Fa(disk_samples(np.random.default_rng(0), 100))) < 1)
    with pytest.raises(DomainError):
        mb.frostman_shift(S, 1.0)


def test_motivating_family():
    assert mb.motivating_family(1).zeros == ((0j, 2),)
    assert mb.motivating_family(4).zeros == ((-0.75 + 0j, 5),)
    for n in (2, 9, 50):
        F = mb.motivating_family(n)
        assert F.degree == n + 1 and F(-1 + 1 / n) == 0


# serialization

def test_json_round_trip():
    B = BlaschkeProduct(((0.1 + 0.2j, 2), (-0.5, 1)), rotation=0.3)
    assert BlaschkeProduct.from_dict(B.to_dict()) == B
    F = InnerFunctionRep(B, SingularAtomicInner(((1.0, 0.5),)), Moebius(0.2j, 1.0))
    G = InnerFunctionRep.from_dict(F.to_dict())
    assert G(0.3) == pytest.approx(F(0.3))
    assert InnerFunctionRep.from_dict(B.to_dict())(0.3) == pytest.approx(B(0.3))
