import logging
import math

import numpy as np
import pytest

from polyak_rates import oracles
from polyak_rates.errors import DimensionMismatch, DomainError, EmptySetList
from polyak_rates.oracles import Ball, Halfspace, Hyperplane, PiecewiseAffine, WholeSpace
from polyak_rates.theory import build_feasibility_resisting_instance, build_polyak_tight_instance


X1_TIGHT_1 = [1. / math.sqrt(3.), 2. / math.sqrt(6.)]


def test_eval_symmetric_tie(abs_function):
    assert oracles.pa_eval(abs_function, [0.]) == (0., [0, 1])
    np.testing.assert_array_equal(oracles.pa_subgradient(abs_function, [0.]), [1.])
    np.testing.assert_array_equal(oracles.pa_subgradient(abs_function, [-2.]), [-1.])
    assert abs_function([-2.]) == 2.


def test_eval_tight_instance_n1():
    function = build_polyak_tight_instance(1).function
    value, active = oracles.pa_eval(function, X1_TIGHT_1)
    assert value == pytest.approx(1. / math.sqrt(3.), abs=1e-12)
    assert active == [0, 1]
    np.testing.assert_allclose(oracles.pa_subgradient(function, X1_TIGHT_1), [1., 0.], atol=1e-15)

    value, active = oracles.pa_eval(function, [0., 2. / math.sqrt(6.)])
    assert value == pytest.approx(4. / (3. * math.sqrt(3.)), abs=1e-12)
    assert active == [1]


def test_piecewise_affine_errors():
    with pytest.raises(DimensionMismatch):
        PiecewiseAffine([[1., 0.]], [0., 1.])
    with pytest.raises(DomainError):
        PiecewiseAffine.from_pieces([])
    with pytest.raises(DimensionMismatch):
        PiecewiseAffine([[1., 0.]], [0.]).evaluate([1.])


def test_subgradient_inequality(rng):
    function = PiecewiseAffine(rng.normal(size=(6, 3)), rng.normal(size=6))
    for _ in range(200):
        x, y = rng.normal(size=3) * 3, rng.normal(size=3) * 3
        g = oracles.pa_subgradient(function, x)
        assert function(y) >= function(x) + g.dot(y - x) - 1e-9


def test_oracle_warns_when_bound_exceeded(abs_function, caplog):
    oracle = oracles.SubgradientOracle.from_piecewise_affine(abs_function, 0., 0.5)
    with caplog.at_level(logging.WARNING, logger='polyak_rates.oracles'):
        value, g = oracle([3.])
    assert value == 3.
    assert 'exceeds declared bound' in caplog.text


def test_oracle_rejects_negative_bound(abs_function):
    with pytest.raises(DomainError):
        oracles.SubgradientOracle.from_piecewise_affine(abs_function, 0., -1.)


def test_project_examples():
    np.testing.assert_array_equal(oracles.project(Hyperplane([1., 0.], 0.), [3., 4.]), [0., 4.])
    line = Hyperplane([-1. / math.sqrt(2.), 1.], 0.)
    np.testing.assert_allclose(oracles.project(line, [1., 0.]), [2. / 3, math.sqrt(2.) / 3],
                               atol=1e-15)
    np.testing.assert_allclose(oracles.project(Ball([0., 0.], 1.), [0., 2.]), [0., 1.])
    np.testing.assert_array_equal(oracles.project(WholeSpace(), [7., -1.]), [7., -1.])


def test_halfspace_projection():
    halfspace = Halfspace([0., 1.], 1.)
    np.testing.assert_array_equal(halfspace.project([5., 0.]), [5., 0.])
    np.testing.assert_allclose(halfspace.project([5., 3.]), [5., 1.])


def test_distance_examples():
    assert oracles.distance(Hyperplane([0., 1.], 0.), [5., 0.]) == 0.
    line = Hyperplane([-1. / math.sqrt(2.), 1.], 0.)
    assert oracles.distance(line, [2. / 3, 0.]) == pytest.approx(0.384900179, abs=1e-9)
    level = Hyperplane([1., 0.], 1. / math.sqrt(2.))
    assert oracles.distance(level, [0., 0.]) == pytest.approx(1. / math.sqrt(2.), abs=1e-15)


def test_set_errors():
    with pytest.raises(DomainError):
        Hyperplane([0., 0.], 1.)
    with pytest.raises(DomainError):
        Ball([0.], -1.)
    with pytest.raises(DimensionMismatch):
        Ball([0., 0.], 1.).project([1., 2., 3.])


def _random_sets(rng, dimension):
    return [
        Hyperplane(rng.normal(size=dimension), rng.normal()),
        Halfspace(rng.normal(size=dimension), rng.normal()),
        Ball(rng.normal(size=dimension), rng.uniform(0.1, 2.)),
        WholeSpace(dimension),
    ]


def test_projection_nonexpansive(rng):
    for convex_set in _random_sets(rng, 4):
        for _ in range(100):
            x, y = rng.normal(size=4) * 4, rng.normal(size=4) * 4
            gap = np.linalg.norm(convex_set.project(x) - convex_set.project(y))
            assert gap <= np.linalg.norm(x - y) + 1e-12


def test_projection_lands_in_set(rng):
    for convex_set in _random_sets(rng, 3):
        for _ in range(50):
            point = convex_set.project(rng.normal(size=3) * 5)
            assert convex_set.distance(point) <= 1e-12
            assert convex_set.contains(point)


def test_sets_registry_round_trips_params(rng):
    for convex_set in _random_sets(rng, 3):
        copy = oracles.SETS[convex_set.kind](**convex_set.params())
        x = rng.normal(size=3)
        np.testing.assert_array_equal(copy.project(x), convex_set.project(x))


def test_max_distance_set():
    sets = build_feasibility_resisting_instance(1, 1.).sets
    index, value = oracles.max_distance_set(sets, [0., 0.])
    assert index == 0
    assert value == pytest.approx(1. / math.sqrt(2.), abs=1e-15)

    sets = [Hyperplane([1., 0.], 1.), Hyperplane([0., 1.], 5.)]
    assert oracles.max_distance_set(sets, [0., 0.]) == (1, 5.)
    assert oracles.max_distance_set(sets[:1], [0., 0.]) == (0, 1.)


def test_max_distance_set_errors():
    with pytest.raises(EmptySetList):
        oracles.max_distance_set([], [0.])
    with pytest.raises(DimensionMismatch):
        oracles.max_distance_set([Hyperplane([1., 0.], 1.)], [0., 0., 0.])


def test_distance_oracle(rng):
    sets = [Hyperplane([1., 0.], 1.), Ball([0., 3.], 1.)]
    oracle = oracles.distance_oracle(sets)
    assert oracle.f_star == 0.
    assert oracle.subgradient_bound == 1.
    value, g = oracle([0., 0.])
    assert value == pytest.approx(2.)
    np.testing.assert_allclose(g, [0., -1.])
    for _ in range(50):
        x = rng.normal(size=2) * 5
        value, g = oracle(x)
        assert np.linalg.norm(g) == pytest.approx(1., abs=1e-12)


def test_distance_oracle_feasible_point():
    oracle = oracles.distance_oracle([Hyperplane([1., 0.], 1.)])
    value, g = oracle([1., 4.])
    assert value == 0.
    np.testing.assert_array_equal(g, [0., 0.])


def test_tight_instance_slopes_have_unit_norm():
    for N in (1, 4, 17):
        slopes = build_polyak_tight_instance(N).function.slopes
        np.testing.assert_allclose(np.linalg.norm(slopes[:-1], axis=1), 1., atol=1e-10)
        np.testing.assert_array_equal(slopes[-1], 0.)
