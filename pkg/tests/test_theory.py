import math

import numpy as np
import pytest

from polyak_rates import linalg, solvers, theory
from polyak_rates.errors import BadIndices, BadMultipliers, DomainError, LengthMismatch
from polyak_rates.generators import random_piecewise_affine


SQRT3 = math.sqrt(3.)


@pytest.mark.parametrize('k, N, expected', [
    (1, 1, 1.5),
    (1, 2, 45. / 32),
    (2, 3, 175. / 144),
])
def test_wallis_factor(k, N, expected):
    assert theory.wallis_factor(k, N) == pytest.approx(expected, rel=1e-14)


def test_wallis_factor_bounds():
    for N in range(2, 501):
        inner = theory.wallis_table(N)[:-1]
        assert np.all(inner > 1.) and np.all(inner < 2.)
    table = theory.wallis_table(500)
    for k in (1, 7, 250, 499):
        assert table[k - 1] == pytest.approx(theory.wallis_factor(k, 500), rel=1e-12)


def test_wallis_factor_bad_indices():
    with pytest.raises(BadIndices):
        theory.wallis_factor(0, 3)
    with pytest.raises(BadIndices):
        theory.wallis_factor(4, 3)


def test_step_weights():
    pack = theory.seq_a_stepweights(1)
    np.testing.assert_allclose(pack.a, [1., 1.5])
    np.testing.assert_allclose(pack.p, [1.5])
    np.testing.assert_allclose(pack.q, [1.])

    pack = theory.seq_a_stepweights(2)
    np.testing.assert_allclose(pack.a, [1., 5. / 4, 225. / 128], rtol=1e-14)


def test_step_weight_identities():
    N = 5
    pack = theory.seq_a_stepweights(N)
    assert np.all(pack.a > 0) and np.all(pack.y > 0)
    np.testing.assert_allclose(pack.p, pack.a[1:] * pack.y, rtol=1e-13)
    np.testing.assert_allclose(pack.q, pack.a[:-1] * pack.y, rtol=1e-13)
    for k in range(1, N + 1):
        assert math.fsum(pack.p[:k - 1]) == pytest.approx(
            2 * N + 1 - 2 * (N + 1 - k) * pack.p[k - 1], rel=1e-12, abs=1e-12)


def test_matrix_q_polyak():
    np.testing.assert_allclose(theory.matrix_Q_polyak(1).entries, [[0.75]])
    Q = theory.matrix_Q_polyak(2).entries
    np.testing.assert_allclose(Q, [[0.9375, -0.439453], [-0.439453, 1.304627]], atol=1e-6)
    assert np.linalg.det(Q) > 0


@pytest.mark.parametrize('N', range(1, 101))
def test_matrix_q_polyak_positive_definite(N):
    Q = theory.matrix_Q_polyak(N)
    assert linalg.min_eigenvalue(Q) > 0
    offdiagonal = Q.entries[~np.eye(N, dtype=bool)]
    assert np.all(offdiagonal < 0)


def test_matrix_a_adaptive():
    A = theory.matrix_A_adaptive(1)
    np.testing.assert_allclose(A.entries, [[0.5, -0.5], [-0.5, 0.5]])
    assert linalg.min_eigenvalue(A) == pytest.approx(0., abs=1e-10)


def test_matrix_a_adaptive_diagonally_dominant():
    entries = theory.matrix_A_adaptive(10).entries
    off = np.sum(np.abs(entries), axis=1) - np.abs(np.diag(entries))
    assert np.all(np.diag(entries) >= off - 1e-12)


@pytest.mark.parametrize('N', range(1, 101))
def test_matrix_a_adaptive_semidefinite(N):
    assert linalg.min_eigenvalue(theory.matrix_A_adaptive(N)) >= -1e-10


def test_matrix_a_gram():
    gram = theory.matrix_A_gram(1)
    np.testing.assert_allclose(gram.a, [4. / 3])
    np.testing.assert_allclose(gram.Q.entries, [[1., -1. / 3], [-1. / 3, 1.]])
    assert gram.c == pytest.approx(1. / SQRT3)
    assert gram.A.order == 3

    gram = theory.matrix_A_gram(2)
    np.testing.assert_allclose(gram.a, [16. / 15, 64. / 45], rtol=1e-14)
    assert gram.c == pytest.approx(1. / math.sqrt(5.))


@pytest.mark.parametrize('N', range(1, 101))
def test_matrix_a_gram_solves_for_ones(N):
    gram = theory.matrix_A_gram(N)
    residual = gram.Q.entries.dot(gram.y) - 1.
    assert np.max(np.abs(residual)) < 1e-10


@pytest.mark.parametrize('N, B, R, expected', [
    (0, 1., 1., 1.),
    (1, 1., 1., 4. / (3. * SQRT3)),
    (2, 1., 1., 1024. / (675. * math.sqrt(5.))),
    (3, 2., 0.5, theory.rate_polyak(3, 1., 1.)),
])
def test_rate_polyak(N, B, R, expected):
    assert theory.rate_polyak(N, B, R) == pytest.approx(expected, rel=1e-14)


def test_rate_optimal():
    assert theory.rate_optimal(0, 2., 3.) == 6.
    assert theory.rate_optimal(3, 1., 2.) == 1.
    assert theory.rate_optimal(1, 1., 1.) == pytest.approx(1. / math.sqrt(2.))


def test_rate_altproj():
    assert theory.rate_altproj(1, 1.) == pytest.approx(2. / (3. * SQRT3), rel=1e-14)
    assert theory.rate_altproj(2, 1.) == pytest.approx(0.286217, abs=1e-6)
    exact = math.exp(50 * math.log(100. / 101) - 0.5 * math.log(101.))
    assert theory.rate_altproj(50, 1.) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize('call', [
    lambda: theory.rate_altproj(0, 1.),
    lambda: theory.rate_polyak(-1, 1., 1.),
    lambda: theory.rate_polyak(1, 0., 1.),
    lambda: theory.rate_optimal(1, 1., -1.),
    lambda: theory.growth_lower_bound(1),
    lambda: theory.growth_ratio_check(9),
])
def test_rate_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_rates_order():
    for N in range(1, 60):
        assert theory.rate_polyak(N, 1., 1.) > theory.rate_optimal(N, 1., 1.)


def test_growth():
    assert theory.log_growth(0) == 0.
    assert theory.log_growth(1) == pytest.approx(math.log(4. / 3))
    assert theory.growth_ratio_check(100) == pytest.approx(math.sqrt(2.), rel=0.05)
    assert theory.growth_ratio_check(250) == pytest.approx(math.sqrt(2.), rel=0.05)
    assert theory.growth_ratio_check(500) == pytest.approx(math.sqrt(2.), rel=0.02)


def test_growth_lower_bound():
    table = theory.log_growth_table(2000)
    assert table[99] == pytest.approx(theory.log_growth(100), rel=1e-12)
    for N in range(2, 2001):
        assert table[N - 1] >= theory.growth_lower_bound(N)


def test_tight_values():
    for N in (1, 2, 7, 30):
        values = theory.tight_values(N)
        assert len(values) == N + 1
        assert values[0] == pytest.approx(1. / math.sqrt(2 * N + 1), rel=1e-14)
        assert values[-1] == pytest.approx(theory.rate_polyak(N, 1., 1.), rel=1e-13)
        assert np.all(np.diff(values) > 0)


def test_tight_instance_n1():
    tight = theory.build_polyak_tight_instance(1)
    np.testing.assert_allclose(tight.x1, [1. / SQRT3, 2. / math.sqrt(6.)], atol=1e-15)
    np.testing.assert_allclose(tight.function.slopes,
                               [[1., 0.], [-1. / 3, 2. * math.sqrt(2.) / 3], [0., 0.]], atol=1e-15)
    assert tight.predicted_last_value == pytest.approx(0.769800, abs=1e-6)
    assert tight.function(tight.x1) == pytest.approx(1. / SQRT3, abs=1e-15)
    assert tight.N == 1


@pytest.mark.parametrize('N', range(1, 101))
def test_tight_instance_invariants(N):
    tight = theory.build_polyak_tight_instance(N)
    assert np.linalg.norm(tight.x1 - tight.x_star) == pytest.approx(1., abs=1e-10)
    assert tight.function(tight.x_star) == pytest.approx(tight.f_star, abs=1e-10)
    np.testing.assert_allclose(tight.G.T.dot(tight.G), theory.matrix_A_gram(N).A.entries,
                               atol=1e-10)


def test_altproj_tight_instance():
    pair = theory.build_altproj_tight_instance(1)
    np.testing.assert_allclose(pair.C1.a, [-1. / math.sqrt(2.), 1.])
    np.testing.assert_allclose(pair.C2.a, [0., 1.])
    np.testing.assert_array_equal(pair.x1, [1., 0.])
    assert pair.predicted == pytest.approx(0.384900, abs=1e-6)
    assert pair.C1.distance([0., 0.]) == 0. and pair.C2.distance([0., 0.]) == 0.
    assert theory.build_altproj_tight_instance(2).predicted == pytest.approx(0.286217, abs=1e-6)
    assert pair.as_feasibility().R == 1.


def test_resisting_instance():
    instance = theory.build_feasibility_resisting_instance(1, 1.)
    assert len(instance) == 2
    np.testing.assert_allclose(instance.known_solution, [1. / math.sqrt(2.)] * 2)

    instance = theory.build_feasibility_resisting_instance(3, 2.)
    np.testing.assert_allclose(instance.known_solution, 1.)
    assert np.linalg.norm(instance.known_solution - instance.x1) == pytest.approx(2.)
    assert instance.R == 2.


def _abs_trace(abs_oracle, N=1):
    return solvers.subgradient_method(abs_oracle, None, [1.], N, solvers.Polyak())


def test_certificate_abs(abs_oracle):
    certificate = theory.certificate_lemma1(_abs_trace(abs_oracle), [1., 1., 1.], 1., [0.], 0.)
    assert certificate.lhs == pytest.approx(1.)
    assert certificate.rhs == pytest.approx(1.5)
    assert certificate.slack == pytest.approx(0.5)
    assert certificate.holds


def test_certificate_uses_oracle_at_last_iterate(abs_oracle):
    trace = _abs_trace(abs_oracle)
    with_oracle = theory.certificate_lemma1(trace, [1., 1., 1.], 1., [0.], 0., abs_oracle)
    assert with_oracle.slack == theory.certificate_lemma1(trace, [1., 1., 1.], 1., [0.], 0.).slack

    trace.last_subgradient = None
    with pytest.raises(LengthMismatch):
        theory.certificate_lemma1(trace, [1., 1., 1.], 1., [0.], 0.)
    assert theory.certificate_lemma1(trace, [1., 1., 1.], 1., [0.], 0., abs_oracle).holds


def test_certificate_errors(abs_oracle):
    trace = _abs_trace(abs_oracle)
    with pytest.raises(LengthMismatch):
        theory.certificate_lemma1(trace, [1., 1.], 1., [0.], 0.)
    with pytest.raises(BadMultipliers, match='multipliers not nondecreasing'):
        theory.certificate_lemma1(trace, [1., 2., 1.], 1., [0.], 0.)
    with pytest.raises(BadMultipliers, match='multipliers not positive'):
        theory.certificate_lemma1(trace, [0., 1., 1.], 1., [0.], 0.)
    with pytest.raises(BadMultipliers):
        theory.certificate_lemma1(trace, [1., 1., 1.], 0., [0.], 0.)


@pytest.mark.parametrize('N', range(1, 31))
def test_certificate_saturates_on_tight_instance(N):
    tight = theory.build_polyak_tight_instance(N)
    trace = solvers.subgradient_method(tight.oracle(), None, tight.x1, N, solvers.Polyak())
    v, h_last = theory.polyak_certificate_multipliers(N)
    certificate = theory.certificate_lemma1(trace, v, h_last, tight.x_star, tight.f_star,
                                            tight.oracle())
    assert abs(certificate.slack) <= 1e-6 * theory.rate_polyak(N, 1., 1.)


def test_certificate_random_tuples(rng):
    for case in range(1000):
        dimension = int(rng.integers(1, 4))
        problem = random_piecewise_affine(rng, dimension, int(rng.integers(2, 4)))
        N = int(rng.integers(1, 8))
        steps = rng.uniform(0.01, 2., size=N)
        trace = solvers.subgradient_method(problem.oracle(), None, problem.x1, N,
                                           solvers.FixedList(steps))
        v = np.cumsum(rng.uniform(0., 1., size=N + 2)) + 0.1
        if case % 3 == 0:
            v = np.full(N + 2, v[0])
        certificate = theory.certificate_lemma1(trace, v, rng.uniform(0.01, 2.),
                                                problem.x_star, problem.f_star)
        assert certificate.holds


def test_adaptive_multipliers_certify_random_runs(rng):
    for _ in range(100):
        problem = random_piecewise_affine(rng, int(rng.integers(1, 5)), int(rng.integers(2, 5)))
        N = int(rng.integers(1, 20))
        oracle = problem.oracle()
        trace = solvers.subgradient_method(oracle, None, problem.x1, N, solvers.AdaptivePolyak())
        v, h_last = theory.adaptive_certificate_multipliers(
            N, problem.B, problem.R, trace.f_last - problem.f_star)
        assert np.all(np.diff(v) >= 0)
        certificate = theory.certificate_lemma1(trace, v, h_last, problem.x_star, problem.f_star,
                                                oracle)
        assert certificate.holds
