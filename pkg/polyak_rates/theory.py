import collections
import logging
import math

import numpy as np

from .errors import (BadIndices, BadMultipliers, ConstructionError, DomainError,
                     LengthMismatch)
from .feasibility import FeasibilityInstance
from .linalg import (SymMatrix, as_vector, cholesky_upper, log_product,
                     solve_upper_transposed)
from .oracles import Hyperplane, PiecewiseAffine, SubgradientOracle


log = logging.getLogger('polyak_rates.theory')


"""Rate formulas, the matrices behind them, and instances on which the rates are attained.

Products of ratios are evaluated in log space: (2N)^{2N} / (2N+1)^{2N+1}
and its relatives leave the double range long before N gets interesting.

"""


GRAM_TOL = 1e-10
NORM_TOL = 1e-10


def _check_order(N, minimum=1):
    if not (isinstance(N, (int, np.integer)) and N >= minimum):
        raise DomainError('N must be an integer >= %d, got %r' % (minimum, N))


def _check_positive(**values):
    for name, value in sorted(values.items()):
        if not value > 0:
            raise DomainError('%s must be positive, got %r' % (name, value))


def _wallis_ratio(i):
    """4i^2 / (4i^2 - 1)"""
    return 4. * i * i / (4. * i * i - 1.)


def wallis_factor(k, N):
    """(2k+1)/(2k) * prod_{i=k+1}^N (4i^2-1)/(4i^2), which lies in (1, 2) for k < N."""
    if not 1 <= k <= N:
        raise BadIndices('need 1 <= k <= N, got k=%r, N=%r' % (k, N))
    terms = [((2. * k + 1.) / (2. * k), 1)]
    terms.extend((_wallis_ratio(i), -1) for i in range(k + 1, N + 1))
    return math.exp(log_product(terms))


def wallis_table(N):
    """wallis_factor(k, N) for k = 1..N at once."""
    _check_order(N)
    i = np.arange(1, N + 1, dtype=float)
    logs = np.log1p(-1. / (4. * i * i))
    tails = np.cumsum(logs[::-1])[::-1] - logs   # sum over i = k+1..N
    return np.exp(np.log1p(1. / (2. * i)) + tails)


class SequencePack(collections.namedtuple('SequencePack', ['N', 'a', 'p', 'q', 'y'])):

    """Step weights a_0..a_N and the auxiliary sequences p, q, y (entry k-1 holds index k)."""

    __slots__ = ()


def seq_a_stepweights(N):
    """Weights of the Polyak-rate analysis.

    a_k = prod_{i=N+1-k}^N ((2i+1)/(2i)) (4i^2/(4i^2-1))^{N+1-i-k}, a_0 = 1, and
    p_k = prod (2i+1)/(2i), q_k = prod_{i=N+2-k}^N 2i/(2i-1),
    y_k = prod (4i^2/(4i^2-1))^{i+k-N-1}, so that p_k = a_k y_k and q_k = a_{k-1} y_k.

    """
    _check_order(N)
    a = [1.]
    p, q, y = [], [], []
    for k in range(1, N + 1):
        span = range(N + 1 - k, N + 1)
        a.append(math.exp(log_product(
            [((2. * i + 1.) / (2. * i), 1) for i in span] +
            [(_wallis_ratio(i), N + 1 - i - k) for i in span])))
        p.append(math.exp(log_product(((2. * i + 1.) / (2. * i), 1) for i in span)))
        q.append(math.exp(log_product((2. * i / (2. * i - 1.), 1) for i in range(N + 2 - k, N + 1))))
        y.append(math.exp(log_product((_wallis_ratio(i), i + k - N - 1) for i in span)))
    return SequencePack(N, np.array(a), np.array(p), np.array(q), np.array(y))


def _index_grid(order):
    index = np.arange(1, order + 1)
    rows, cols = np.meshgrid(index, index, indexing='ij')
    return index, np.minimum(rows, cols), np.maximum(rows, cols)


def matrix_Q_polyak(N):
    """N x N matrix whose positive definiteness drives the Polyak rate.

    Q_ii = 2 a_i a_{i-1} - a_i^2, Q_ij = (a_{min-1} - a_min) a_max.

    """
    a = seq_a_stepweights(N).a
    index, low, high = _index_grid(N)
    entries = (a[low - 1] - a[low]) * a[high]
    np.fill_diagonal(entries, 2. * a[index] * a[index - 1] - a[index] ** 2)
    return SymMatrix(entries)


def matrix_A_adaptive(N):
    """(N+1) x (N+1) positive semidefinite matrix of the adaptive Polyak rate.

    With a_k = 1/(N+1-k), a_{N+1} = a_N: Q_ii = 2 a_{i-1} - a_0,
    Q_ij = a_{min-1} - a_min, and A = Q - e_{N+1} e_{N+1}^T.

    """
    _check_order(N)
    a = np.array([1. / (N + 1 - k) for k in range(N + 1)] + [1.])
    index, low, high = _index_grid(N + 1)
    entries = a[low - 1] - a[low]
    np.fill_diagonal(entries, 2. * a[index - 1] - a[0])
    entries[N, N] -= 1.
    return SymMatrix(entries)


class GramSystem(collections.namedtuple('GramSystem', ['A', 'Q', 'a', 'c', 'y'])):

    """A = [[1, c e^T], [c e, Q]] with Q y = e; a holds a_1..a_N, y holds y_1..y_{N+1}."""

    __slots__ = ()


def matrix_A_gram(N):
    """Gram matrix of the worst-case Polyak instance.

    a_k = prod_{i=N+1-k}^N 4i^2/(4i^2-1); Q has unit diagonal and Q_ij = 1 - a_min.

    """
    _check_order(N)
    i = np.arange(N, 0, -1, dtype=float)
    a = np.exp(np.cumsum(np.log1p(1. / (4. * i * i - 1.))))
    y = np.exp(np.cumsum(np.log1p(1. / (2. * i))))
    y = np.append(y, y[-1])
    index, low, high = _index_grid(N + 1)
    low = np.minimum(low, N)  # the diagonal is overwritten below
    q = 1. - a[low - 1]
    np.fill_diagonal(q, 1.)
    c = 1. / math.sqrt(2 * N + 1)
    entries = np.empty((N + 2, N + 2))
    entries[0, 0] = 1.
    entries[0, 1:] = c
    entries[1:, 0] = c
    entries[1:, 1:] = q
    return GramSystem(SymMatrix(entries), SymMatrix(q), a, c, y)


def rate_polyak(N, B, R):
    """BR / sqrt(2N+1) * prod_{i=1}^N (4i^2/(4i^2-1))^i, exact for the Polyak step."""
    _check_order(N, 0)
    _check_positive(B=B, R=R)
    terms = [(B, 1), (R, 1), (2. * N + 1., -0.5)]
    terms.extend((_wallis_ratio(i), i) for i in range(1, N + 1))
    return math.exp(log_product(terms))


def rate_optimal(N, B, R):
    """BR / sqrt(N+1), the lower bound for any black-box method."""
    _check_order(N, 0)
    _check_positive(B=B, R=R)
    return B * R / math.sqrt(N + 1)


def rate_altproj(N, R):
    """R (2N/(2N+1))^N / sqrt(2N+1) for the last alternating-projection iterate.

    The looser constant 4R/(9 sqrt(2N+1)) sometimes quoted alongside this rate
    does not hold at N = 1 and is not provided.

    """
    _check_order(N, 1)
    _check_positive(R=R)
    return math.exp(log_product([(R, 1), (2. * N / (2. * N + 1.), N), (2. * N + 1., -0.5)]))


def log_growth(N):
    """ln a_N for a_N = prod_{i=1}^N (4i^2/(4i^2-1))^i."""
    _check_order(N, 0)
    return log_product((_wallis_ratio(i), i) for i in range(1, N + 1))


def log_growth_table(N):
    """log_growth(n) for n = 1..N."""
    _check_order(N)
    i = np.arange(1, N + 1, dtype=float)
    return np.cumsum(i * np.log1p(1. / (4. * i * i - 1.)))


def growth_lower_bound(N):
    """1/4 ln(N-1) - 1/8, a lower bound on log_growth(N)."""
    _check_order(N, 2)
    return 0.25 * math.log(N - 1) - 0.125


def growth_ratio_check(N):
    """a_{4N} / a_N, which tends to 4^{1/4} = sqrt(2) as a_N grows like N^{1/4}."""
    _check_order(N, 10)
    return math.exp(log_growth(4 * N) - log_growth(N))


def tight_values(N):
    """f^1..f^{N+1} visited by the Polyak method on the worst-case instance.

    f^k = prod_{i=N+1-k}^N (4i^2/(4i^2-1))^{i+k-N-1} / sqrt(2N+1), increasing in k,
    with f^{N+1} = rate_polyak(N, 1, 1).

    """
    _check_order(N)
    values = []
    for k in range(1, N + 2):
        terms = [(2. * N + 1., -0.5)]
        terms.extend((_wallis_ratio(i), i + k - N - 1) for i in range(max(N + 1 - k, 1), N + 1))
        values.append(math.exp(log_product(terms)))
    return np.array(values)


class TightInstance(collections.namedtuple('TightInstance', [
        'function', 'x1', 'x_star', 'f_star', 'predicted_last_value', 'values', 'G'])):

    """Worst-case instance for the Polyak step with B = R = 1."""

    __slots__ = ()

    @property
    def N(self):
        return len(self.function) - 2

    def oracle(self):
        return SubgradientOracle.from_piecewise_affine(self.function, self.f_star, 1.)


def build_polyak_tight_instance(N):
    """Instance on which N Polyak steps end exactly at rate_polyak(N, 1, 1).

    The subgradients g^1..g^{N+1} are the columns of R in Q = R^T R, and
    x^1 solves R^T x^1 = e / sqrt(2N+1); then [x^1, R] is a Gram factor of A.
    The function is max(<g^1, x>, ..., <g^{N+1}, x>, 0): every piece vanishes
    at the minimizer 0.

    """
    gram = matrix_A_gram(N)
    factor = cholesky_upper(gram.Q)
    x1 = solve_upper_transposed(factor, gram.c * np.ones(N + 1))
    G = np.column_stack([x1, factor.entries])
    residual = float(np.max(np.abs(G.T.dot(G) - gram.A.entries)))
    if residual > GRAM_TOL:
        raise ConstructionError('Gram factor residual %.3e for N=%d' % (residual, N))
    if abs(np.linalg.norm(x1) - 1.) > NORM_TOL:
        raise ConstructionError('starting point has norm %r, expected 1' % np.linalg.norm(x1))
    slopes = np.vstack([factor.entries.T, np.zeros(N + 1)])
    function = PiecewiseAffine(slopes, np.zeros(N + 2))
    predicted = rate_polyak(N, 1., 1.)
    log.info('Built Polyak worst-case instance N=%d, predicted %.12g, Gram residual %.3e',
             N, predicted, residual)
    return TightInstance(function, x1, as_vector(np.zeros(N + 1)), 0., predicted,
                         tight_values(N), G)


class AltProjInstance(collections.namedtuple('AltProjInstance', [
        'C1', 'C2', 'x1', 'x_star', 'predicted'])):

    __slots__ = ()

    def as_feasibility(self):
        return FeasibilityInstance([self.C1, self.C2], self.x1, self.x_star, R=1.)


def build_altproj_tight_instance(N):
    """Lines x_2 = x_1/sqrt(2N) and x_2 = 0 from x^1 = (1, 0), meeting only at 0."""
    _check_order(N)
    C1 = Hyperplane([-1. / math.sqrt(2. * N), 1.], 0.)
    C2 = Hyperplane([0., 1.], 0.)
    return AltProjInstance(C1, C2, as_vector([1., 0.]), as_vector([0., 0.]),
                           rate_altproj(N, 1.))


def build_feasibility_resisting_instance(N, R):
    """Hyperplanes x_i = R/sqrt(N+1), i = 1..N+1, from x^1 = 0.

    A method that only moves along x^k - P_{C_i}(x^k) adds at most one nonzero
    coordinate per step, and any point with a zero coordinate is R/sqrt(N+1)
    away from one of the sets.

    """
    _check_order(N)
    _check_positive(R=R)
    level = R / math.sqrt(N + 1)
    sets = [Hyperplane(np.eye(N + 1)[i], level) for i in range(N + 1)]
    return FeasibilityInstance(sets, np.zeros(N + 1), level * np.ones(N + 1), R)


class Certificate(collections.namedtuple('Certificate', ['v', 'h_last', 'lhs', 'rhs', 'slack'])):

    """Multipliers v_0..v_{N+1}, h_{N+1}, and both sides of the certified inequality."""

    __slots__ = ()

    @property
    def holds(self):
        return self.slack >= -1e-9


def certificate_lemma1(trace, v, h_last, x_star, f_star, oracle=None):
    """Check the multiplier inequality behind every last-iterate bound on a recorded run.

    For 0 < v_0 <= ... <= v_{N+1} and h_{N+1} > 0,

      sum_k (h_k v_k v_{k-1} - (v_k - v_{k-1}) sum_{i>k} h_i v_i) f(x^k) - v_0 sum_k h_k v_k f*
        <= v_0^2/2 ||x^1 - x*||^2 + 1/2 sum_k h_k^2 v_k^2 ||g^k||^2,

    with k and i running to N+1. The k = N+1 terms use f and a subgradient at
    x^{N+1}: from the oracle when given, otherwise as stored in the trace.

    """
    v = as_vector(v, 'v')
    N = trace.N
    if v.shape[0] != N + 2:
        raise LengthMismatch('need %d multipliers for %d steps, got %d' % (N + 2, N, v.shape[0]))
    if not v[0] > 0:
        raise BadMultipliers('multipliers not positive')
    if np.any(np.diff(v) < 0):
        raise BadMultipliers('multipliers not nondecreasing')
    if not h_last > 0:
        raise BadMultipliers('h_last must be positive, got %r' % h_last)
    if oracle is not None:
        f_last, g_last = oracle(trace.x_last)
    else:
        f_last, g_last = trace.f_last, trace.last_subgradient
        if g_last is None:
            raise LengthMismatch('trace has no subgradient at the last iterate; pass the oracle')
    x_star = as_vector(x_star, 'x_star')
    h = np.append(trace.step_sizes, h_last)
    f = np.append(trace.values[:-1], f_last)
    g_norm_sq = np.append(np.sum(trace.subgradients ** 2, axis=1) if N else [], g_last.dot(g_last))
    hv = h * v[1:]
    tails = np.cumsum(hv[::-1])[::-1] - hv
    coefficients = hv * v[:-1] - (v[1:] - v[:-1]) * tails
    lhs = math.fsum(coefficients * f) - v[0] * math.fsum(hv) * f_star
    rhs = (0.5 * v[0] ** 2 * float(np.sum((trace.x1 - x_star) ** 2)) +
           0.5 * math.fsum(hv ** 2 * g_norm_sq))
    log.debug('Certificate lhs=%.17g rhs=%.17g', lhs, rhs)
    return Certificate(v, float(h_last), lhs, rhs, rhs - lhs)


def polyak_certificate_multipliers(N, B=1., R=1.):
    """Multipliers proving rate_polyak: v_k = v_0 a_k, v_{N+1} = v_N, h_{N+1} = 1/v_N^2.

    v_0 = sqrt(B) / (R^2 (2N+1))^{1/4} * prod_{i=1}^N (4i^2/(4i^2-1))^{i/2}.

    """
    _check_positive(B=B, R=R)
    a = seq_a_stepweights(N).a
    terms = [(B, 0.5), (R, -0.5), (2. * N + 1., -0.25)]
    terms.extend((_wallis_ratio(i), 0.5 * i) for i in range(1, N + 1))
    v = math.exp(log_product(terms)) * np.append(a, a[-1])
    return v, 1. / v[N] ** 2


def adaptive_certificate_multipliers(N, B, R, gap_last):
    """Multipliers proving rate_optimal for the adaptive Polyak step.

    v_k = ((N+1)^3)^{1/4} / (N+1-k) * sqrt(B/R) for k = 0..N, v_{N+1} = v_N, and
    h_{N+1} = (f(x^{N+1}) - f*) / ((N+1) B^2), kept positive.

    """
    _check_order(N)
    _check_positive(B=B, R=R)
    k = np.arange(N + 1, dtype=float)
    v = (N + 1.) ** 0.75 / (N + 1. - k) * math.sqrt(B / R)
    v = np.append(v, v[-1])
    h_last = max(gap_last, np.finfo(float).tiny) / ((N + 1.) * B ** 2)
    return v, h_last
