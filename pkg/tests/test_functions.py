import math

import numpy as np
import pytest

from fortified.functions import (
    BRANIN_DOMAIN,
    BoxDomain,
    BraninParams,
    ObjectiveFunction,
    branin_hoo,
    branin_registry,
    get_function,
    optimum_by_label,
)

PAPER_OPTIMUM_VALUE = 0.397887


def central_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_default_params():
    p = BraninParams()
    assert p.a == 1
    assert p.b == 5.1 / (4 * math.pi**2)
    assert p.c == 5 / math.pi
    assert (p.r, p.s) == (6, 10)
    assert p.t == 1 / (8 * math.pi)


@pytest.mark.parametrize("x", [(-math.pi, 12.275), (math.pi, 2.275), (9.42478, 2.475)])
def test_branin_optima_values(x):
    assert branin_hoo(x) == pytest.approx(PAPER_OPTIMUM_VALUE, abs=1e-5)


def test_branin_origin_by_hand():
    # (0 - 6)^2 + 10 (1 - 1/(8 pi)) cos 0 + 10
    expected = 36 + 10 + 10 - 10 / (8 * math.pi)
    assert branin_hoo((0.0, 0.0)) == pytest.approx(expected, abs=1e-12)
    assert branin_hoo((0.0, 0.0)) == pytest.approx(55.6021, abs=1e-3)


def test_custom_params_change_value():
    assert branin_hoo((0, 0), BraninParams(s=0.0)) == pytest.approx(36.0)


def test_registry_optima():
    objective, optima = branin_registry()
    assert objective.domain == BoxDomain((-5, 0), (10, 15))
    assert [o.label for o in optima] == [1, 2, 3]
    values = [o.value for o in optima]
    assert max(values) - min(values) < 1e-6
    for o in optima:
        assert objective.domain.contains(o.location)
        assert branin_hoo(o.location) == pytest.approx(o.value, abs=1e-6)


def test_registry_distance_between_optima_2_and_3():
    _, optima = branin_registry()
    d = math.dist(optima[1].location, optima[2].location)
    assert d == pytest.approx(6.28, abs=0.1)


@pytest.mark.parametrize("label", [1, 2, 3])
def test_optima_are_stationary(label):
    _, optima = branin_registry()
    loc = optimum_by_label(optima, label).location
    assert np.linalg.norm(central_gradient(branin_hoo, loc)) < 1e-3


def test_eval_counter_and_reset():
    objective, _ = get_function("branin")
    assert objective.eval_count == 0
    a = objective((1.0, 2.0))
    b = objective((1.0, 2.0))
    assert a == b
    assert objective.eval_count == 2
    objective.reset_count()
    assert objective.eval_count == 0


def test_get_function_gives_independent_counters():
    a, _ = get_function("branin")
    b, _ = get_function("branin")
    a((0, 0))
    assert b.eval_count == 0


def test_unknown_function():
    with pytest.raises(ValueError, match="unknown function"):
        get_function("himmelblau")


def test_unknown_label():
    _, optima = branin_registry()
    with pytest.raises(ValueError):
        optimum_by_label(optima, 4)


@pytest.mark.parametrize(
    "lower, upper",
    [((), ()), ((0, 0), (1,)), ((1.0,), (1.0,)), ((2.0, 0.0), (1.0, 1.0))],
)
def test_box_domain_rejects_invalid(lower, upper):
    with pytest.raises(ValueError):
        BoxDomain(lower, upper)


def test_box_domain_geometry():
    assert BRANIN_DOMAIN.dim == 2
    assert BRANIN_DOMAIN.volume == 225.0
    assert BRANIN_DOMAIN.contains((10, 15))
    assert not BRANIN_DOMAIN.contains((10.01, 15))


def test_objective_accepts_arbitrary_evaluator():
    obj = ObjectiveFunction(BoxDomain((0,), (1,)), lambda x: x[0] ** 2, name="sq")
    assert obj(np.array([0.5])) == 0.25
    assert "sq" in repr(obj)
