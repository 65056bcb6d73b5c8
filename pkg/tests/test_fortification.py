import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fortified.fortification import (
    BumpSpec,
    FortifiedFunction,
    OverlappingSupportError,
    bump_phi,
    fortify,
    slice_1d,
)
from fortified.functions import branin_hoo, get_function

OPT1 = (-math.pi, 12.275)


def fortified_branin(label=1, epsilon=1.0, amplitude=10.0):
    base, optima = get_function("branin")
    return fortify(base, optima, label, epsilon, amplitude)


def test_phi_peak():
    assert bump_phi(0.0, 1.0) == pytest.approx(1 / math.e, abs=1e-12)
    assert bump_phi(0.0, 7.5) == bump_phi(0.0, 1.0)


def test_phi_half_radius_by_hand():
    # 1 / (1 - 0.25) = 4/3
    assert bump_phi(0.5, 1.0) == pytest.approx(math.exp(-4 / 3), abs=1e-15)
    assert bump_phi(0.5, 1.0) == pytest.approx(0.263597, abs=1e-6)


@pytest.mark.parametrize("r, eps", [(1.0, 1.0), (2.0, 1.0), (0.5, 2.0), (10.0, 0.1)])
def test_phi_zero_on_and_outside_boundary(r, eps):
    assert bump_phi(r, eps) == 0.0


def test_phi_just_inside_boundary_underflows_smoothly():
    v = bump_phi(1.0 - 1e-12, 1.0)
    assert 0.0 <= v < 1e-100


@given(st.floats(0, 5), st.floats(0.1, 10))
def test_phi_range(r, eps):
    v = bump_phi(r, eps)
    assert 0.0 <= v <= 1 / math.e


def test_bumpspec_validation():
    with pytest.raises(ValueError):
        BumpSpec((0, 0), 0.0)
    with pytest.raises(ValueError):
        BumpSpec((0, 0), 1.0, amplitude=-1)
    b = BumpSpec((0, 0), 2.0, 10.0)
    assert b.radius == 0.5
    assert b.depth == pytest.approx(10 / math.e)


def test_fortified_center_value():
    f, optima = fortified_branin()
    expected = branin_hoo(OPT1) - 10 / math.e
    assert f(OPT1) == pytest.approx(expected, abs=1e-12)
    assert f(OPT1) == pytest.approx(0.397887 - 10 / math.e, abs=1e-4)
    assert f.fortified_optimum_value == pytest.approx(expected, abs=1e-12)
    assert optima[0].value == pytest.approx(expected, abs=1e-12)


def test_other_optima_untouched():
    f, optima = fortified_branin()
    assert f((math.pi, 2.275)) == branin_hoo((math.pi, 2.275))
    base_values = [o.value for o in get_function("branin")[1]]
    assert optima[1].value == base_values[1]
    assert optima[2].value == base_values[2]


def test_narrow_bump_same_depth_half_radius():
    f1, _ = fortified_branin(epsilon=1.0)
    f2, _ = fortified_branin(epsilon=2.0)
    assert f2(OPT1) == f1(OPT1)
    assert f2.bumps[0].radius == 0.5
    probe = (OPT1[0], OPT1[1] + 0.75)
    assert f2(probe) == branin_hoo(probe)
    assert f1(probe) < branin_hoo(probe)


def test_overlap_rejected():
    # optima 2 and 3 are about 6.3 apart
    with pytest.raises(OverlappingSupportError):
        fortified_branin(label=2, epsilon=0.15)


def test_second_bump_can_be_added_and_overlap_checked():
    f, optima = fortified_branin(label=1)
    base = f
    f2, optima2 = fortify(base, optima, 3, 1.0, 10.0)
    assert len(f2.bumps) == 2
    assert optima2[2].value == pytest.approx(optima2[0].value, abs=1e-5)
    with pytest.raises(OverlappingSupportError):
        fortify(f, optima, 2, 0.15, 10.0)


def test_center_outside_domain_rejected():
    base, _ = get_function("branin")
    with pytest.raises(ValueError):
        FortifiedFunction(base, [BumpSpec((20.0, 0.0), 1.0)])


def test_counter_counts_calls_not_bump_branches():
    f, _ = fortified_branin()
    f(OPT1)
    f((5.0, 5.0))
    assert f.eval_count == 2
    assert f.base.eval_count == 0


points = st.tuples(st.floats(-5, 10), st.floats(0, 15))


@settings(max_examples=300)
@given(points)
def test_compact_support_bit_identity(x):
    f, _ = fortified_branin()
    if math.dist(x, OPT1) >= 1.0:
        assert f.evaluator(x) == branin_hoo(x)


@settings(max_examples=300)
@given(points)
def test_fortified_never_above_base(x):
    f, _ = fortified_branin()
    assert f.evaluator(x) <= branin_hoo(x)


def test_stationarity_at_bump_center():
    f, _ = fortified_branin()
    h = 1e-6
    x = np.array(OPT1)
    g = [(f.evaluator(x + e) - f.evaluator(x - e)) / (2 * h) for e in (np.array([h, 0]), np.array([0, h]))]
    assert np.linalg.norm(g) < 1e-3


def test_slice_through_bump():
    f, _ = fortified_branin()
    base, _ = get_function("branin")
    sl = slice_1d(f, 0, -math.pi, (0.0, 15.0), 151)
    assert len(sl) == 151
    coords = np.array([c for c, _ in sl])
    values = np.array([v for _, v in sl])
    np.testing.assert_allclose(np.diff(coords), 0.1, atol=1e-12)
    i = int(np.argmin(values))
    assert coords[i] == pytest.approx(12.275, abs=0.1)
    assert values[i] == pytest.approx(-3.28, abs=0.01)
    for c, v in sl:
        if abs(c - 12.275) > 1:
            assert v == branin_hoo((-math.pi, c))

    plain = slice_1d(base, 0, -math.pi, (0.0, 15.0), 151)
    j = int(np.argmin([v for _, v in plain]))
    assert plain[j][0] == pytest.approx(12.275, abs=0.1)
    assert plain[j][1] == pytest.approx(0.3979, abs=2e-3)
    assert base.eval_count == 0 and f.eval_count == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(fixed_dim=0, fixed_value=-math.pi, sweep_range=(-1.0, 15.0), n_points=10),
        dict(fixed_dim=0, fixed_value=-math.pi, sweep_range=(0.0, 15.0), n_points=1),
        dict(fixed_dim=0, fixed_value=-6.0, sweep_range=(0.0, 15.0), n_points=10),
        dict(fixed_dim=2, fixed_value=0.0, sweep_range=(0.0, 1.0), n_points=10),
    ],
)
def test_slice_rejects_bad_input(kwargs):
    f, _ = fortified_branin()
    with pytest.raises(ValueError):
        slice_1d(f, **kwargs)
