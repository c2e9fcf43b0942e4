import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from innerlab import extremal as ex
from innerlab import thickness as th
from innerlab.errors import ValidationError
from innerlab.extremal import NEUMANN, SIDE_A, SIDE_B, GridDomain

# Calibrated on notch fixtures of side 0.05 to 0.2 at Δ = 1/100 and 1/200, where the
# ratio excess / deficit(k = 2) stays in [0.51, 0.55].
LOWER_K, UPPER_K = 0.4, 0.7


@pytest.mark.parametrize("width", [1.0, 2.0, 3.5])
def test_rectangle_modulus(width):
    assert ex.modulus(GridDomain.rectangle(width, 1.0, 0.01)).modulus == pytest.approx(width, rel=1e-2)


def test_rectangle_modulus_aspect():
    assert ex.modulus(GridDomain.rectangle(1.0, 2.0, 0.02)).modulus == pytest.approx(0.5, rel=1e-2)


def test_solver_reports_convergence():
    r = ex.modulus(GridDomain.rectangle(2.0, 1.0, 0.02), preconditioner="jacobi")
    assert r.residual <= 1e-9 and r.iterations > 0 and r.cells == 5000


def test_notch_example():
    m = ex.modulus(ex.notch_domain(2.0, 0.2, 0.01)).modulus
    assert 2.0 <= m <= 2.36


@pytest.mark.parametrize("notch", [0.05, 0.1, 0.15, 0.2])
def test_two_sided_bound(notch):
    excess = ex.modulus(ex.notch_domain(2.0, notch, 0.01)).modulus - 2.0
    deficit = ex.notch_deficit(2.0, notch)
    assert LOWER_K * deficit <= excess <= UPPER_K * deficit


def test_grid_refinement():
    values = [ex.modulus(ex.notch_domain(2.0, 0.2, d)).modulus for d in (0.02, 0.01, 0.005)]
    first, second = abs(values[1] - values[0]), abs(values[2] - values[1])
    assert second < 4 * first
    assert second < first


def test_validation_errors():
    mask = np.zeros((10, 10), dtype=bool)
    mask[:, :3] = mask[:, 6:] = True
    with pytest.raises(ValidationError):
        GridDomain.from_rule(mask, 0.1, mode="normal")
    with pytest.raises(ValidationError):
        GridDomain.from_rule(np.ones((10, 10), bool), 0.1, mode="normal",
                             sides={"down": "A", "up": "A", "left": "N", "right": "N"})
    with pytest.raises(ValidationError):
        GridDomain.from_rule(np.zeros((4, 4), bool), 0.1)


def _with_bump(width_cells, height_cells, rows, depth):
    base = GridDomain.rectangle(width_cells, height_cells, 1.0)
    ny, nx = base.mask.shape
    mask = np.zeros((ny, nx + depth), dtype=bool)
    mask[:, :nx] = True
    mask[rows[0]:rows[1], nx:] = True
    labels = {}
    for d, lab in base.labels.items():
        big = np.full(mask.shape, NEUMANN)
        big[:, :nx] = lab
        labels[d] = big
    return base, GridDomain(mask, 1.0, labels)


@settings(max_examples=15)
@given(st.integers(10, 30), st.integers(10, 20), st.integers(1, 8), st.data())
def test_enlarging_across_neumann_faces_never_decreases(w, h, depth, data):
    lo = data.draw(st.integers(1, h - 2))
    hi = data.draw(st.integers(lo + 1, h - 1))
    small, big = _with_bump(w, h, (lo, hi), depth)
    assert ex.modulus(big).modulus >= ex.modulus(small).modulus - 1e-8


def test_strip_window_identity():
    U = th.StripGraphDomain.from_functions(0, 20, 2001)
    g = GridDomain.from_strip_window(U, 8, 16, 0.01)
    assert ex.modulus(g).modulus == pytest.approx(8.0, rel=1e-6)


def test_rw_criterion_identity_is_thick():
    U = th.StripGraphDomain.from_functions(1, 128, 12_701)
    v = ex.rw_criterion(U, th.DYADIC_WINDOWS[:3], delta=0.02)
    assert v.verdict is th.Verdict.THICK
    assert max(abs(e) for e in v.values) < 1e-6


def test_pgm_round_trip(tmp_path):
    mask = np.zeros((20, 30), dtype=bool)
    mask[2:18, 3:27] = True
    mask[2:5, 10:14] = False
    path = tmp_path / "mask.pgm"
    ex.write_pgm_mask(path, mask)
    assert np.array_equal(ex.read_pgm_mask(path), mask)
    marking = tmp_path / "marking.json"
    marking.write_text(json.dumps({"mode": "normal", "down": "A", "up": "B", "left": "N", "right": "N"}))
    g = ex.load_grid_domain(path, marking, 0.05)
    direct = GridDomain.from_rule(mask, 0.05, mode="normal")
    assert ex.modulus(g).modulus == pytest.approx(ex.modulus(direct).modulus, rel=1e-12)
    assert SIDE_A != SIDE_B
