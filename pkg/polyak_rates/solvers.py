import collections
import logging
import math

import numpy as np

from .errors import (BadIndices, DomainError, InfeasibleStart, MissingOptimalValue,
                     MissingSubgradientBound, PreconditionError, ZeroSubgradient)
from .linalg import as_vector
from .oracles import WholeSpace


log = logging.getLogger('polyak_rates.solvers')


"""Projected subgradient method with pluggable step sizes, and the momentum Polyak method."""


FEASIBILITY_TOL = 1e-10
ZERO_SUBGRADIENT_SQ = 1e-24
OPTIMALITY_TOL = 1e-15      # f(x^k) - f* at or below this (relative) freezes the iterates
BELOW_OPTIMUM_TOL = 1e-9    # f(x^k) further below f* than this means a wrong f*


class StepSchedule(object):

    """Base class for step size rules.

    Child classes must implement _step().

    """

    name = None
    needs_f_star = False
    divides_by_subgradient = False

    def check_horizon(self, N):
        pass

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        raise NotImplementedError

    def step_size(self, k, N, f_k, f_star, g_norm_sq):
        if not 1 <= k <= N:
            raise BadIndices('iteration %d outside 1..%d' % (k, N))
        if self.needs_f_star and f_star is None:
            raise MissingOptimalValue('%s step needs the optimal value f_star' % self.name)
        if self.divides_by_subgradient and g_norm_sq <= ZERO_SUBGRADIENT_SQ:
            if f_star is None or f_k > f_star:
                raise ZeroSubgradient('zero subgradient at iteration %d with f = %r above f* = %r'
                                      % (k, f_k, f_star))
            return 0.
        return self._step(k, N, f_k, f_star, g_norm_sq)

    def __repr__(self):
        return '<%s>' % self.name


class Fixed(StepSchedule):

    name = 'fixed'

    def __init__(self, h):
        if not h > 0:
            raise DomainError('fixed step must be positive, got %r' % h)
        self.h = float(h)

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        return self.h


class FixedList(StepSchedule):

    """Replays a given list of steps h_1, h_2, ..."""

    name = 'fixed-list'

    def __init__(self, steps):
        self.steps = [float(h) for h in steps]
        if any(not h >= 0 for h in self.steps):
            raise DomainError('listed steps must be nonnegative')

    def check_horizon(self, N):
        if len(self.steps) < N:
            raise BadIndices('%d steps listed for %d iterations' % (len(self.steps), N))

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        return self.steps[k - 1]


class PolyakT(StepSchedule):

    """h_k = t (f(x^k) - f*) / ||g^k||^2 with 0 < t < 2."""

    name = 'polyak-t'
    needs_f_star = True
    divides_by_subgradient = True

    def __init__(self, t):
        if not 0 < t < 2:
            raise DomainError('Polyak factor t must lie in (0, 2), got %r' % t)
        self.t = float(t)

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        return self.t * (f_k - f_star) / g_norm_sq


class Polyak(PolyakT):

    name = 'polyak'

    def __init__(self):
        PolyakT.__init__(self, 1.)


class AdaptivePolyak(StepSchedule):

    """Polyak step damped by (N+1-k)/(N+1)."""

    name = 'adaptive-polyak'
    needs_f_star = True
    divides_by_subgradient = True

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        return (N + 1 - k) * (f_k - f_star) / ((N + 1) * g_norm_sq)


class PreSizedOptimal(StepSchedule):

    """h_k = R (N+1-k) / (||g^k|| sqrt((N+1)^3)), optimal when ||x^1 - x*|| <= R."""

    name = 'presized'
    divides_by_subgradient = True

    def __init__(self, R):
        if not R > 0:
            raise DomainError('presized step needs R > 0, got %r' % R)
        self.R = float(R)

    def _step(self, k, N, f_k, f_star, g_norm_sq):
        return self.R * (N + 1 - k) / (math.sqrt(g_norm_sq) * math.sqrt((N + 1) ** 3))


SCHEDULES = {
    'fixed': Fixed,
    'polyak-t': PolyakT,
    'polyak': Polyak,
    'adaptive-polyak': AdaptivePolyak,
    'presized': PreSizedOptimal,
}


def step_size(schedule, k, N, f_k, f_star, g_norm_sq):
    return schedule.step_size(k, N, f_k, f_star, g_norm_sq)


class Step(collections.namedtuple('Step', ['k', 'x', 'f', 'g', 'h', 'momentum'])):

    """One recorded iteration: iterate x^k, f(x^k), subgradient g^k, step h_k.

    momentum is the displacement added on top of the subgradient step, or None.

    """

    __slots__ = ()

    def __repr__(self):
        return '<Step k=%d f=%r h=%r>' % (self.k, self.f, self.h)


class RunTrace(object):

    """Full record of a solver run: N steps, then x^{N+1} and f(x^{N+1})."""

    def __init__(self, steps, x_last, f_last, last_subgradient=None, method=None):
        self.steps = list(steps)
        self.x_last = x_last
        self.f_last = f_last
        self.last_subgradient = last_subgradient
        self.method = method

    @property
    def N(self):
        return len(self.steps)

    @property
    def x1(self):
        return self.steps[0].x if self.steps else self.x_last

    @property
    def iterates(self):
        """Array of x^1..x^{N+1}, one per row."""
        return np.array([step.x for step in self.steps] + [self.x_last])

    @property
    def values(self):
        return np.array([step.f for step in self.steps] + [self.f_last])

    @property
    def subgradients(self):
        return np.array([step.g for step in self.steps])

    @property
    def step_sizes(self):
        return np.array([step.h for step in self.steps])

    def distances_to(self, point):
        """||x^k - point|| for k = 1..N+1."""
        return np.linalg.norm(self.iterates - as_vector(point, 'point'), axis=1)

    def replay(self, domain=None):
        """Rebuild x^1..x^{N+1} from x^1 and the recorded steps."""
        domain = domain or WholeSpace()
        x = self.x1
        iterates = [x]
        for step in self.steps:
            y = x - step.h * step.g
            if step.momentum is not None:
                y = y + step.momentum
            x = domain.project(y)
            iterates.append(x)
        return np.array(iterates)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __repr__(self):
        return '<%s method=%s N=%d f_last=%r>' % (self.__class__.__name__, self.method,
                                                  self.N, self.f_last)


def _check_start(domain, x1, N):
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise DomainError('number of iterations must be a positive integer, got %r' % N)
    distance = domain.distance(x1)
    if distance > FEASIBILITY_TOL:
        raise InfeasibleStart('starting point is at distance %.3e from the domain' % distance)


def _gap(f_k, f_star):
    """Return f_k - f_star, clipped at zero; raise if f_k is clearly below f_star."""
    gap = f_k - f_star
    if gap < -BELOW_OPTIMUM_TOL * (1. + abs(f_star)):
        raise PreconditionError('f(x) = %r lies below the declared optimal value %r'
                                % (f_k, f_star))
    return max(gap, 0.)


def _at_optimum(f_k, f_star):
    return f_star is not None and _gap(f_k, f_star) <= OPTIMALITY_TOL * (1. + abs(f_star))


def subgradient_method(oracle, domain, x1, N, schedule):
    """Run N iterations of x^{k+1} = P_X(x^k - h_k g^k).

    Once f(x^k) reaches the declared f*, the remaining iterates copy x^k with
    h_k = 0.

    """
    domain = domain or WholeSpace()
    x = as_vector(x1, 'x1')
    _check_start(domain, x, N)
    if schedule.needs_f_star and oracle.f_star is None:
        raise MissingOptimalValue('%s step needs the optimal value f_star' % schedule.name)
    schedule.check_horizon(N)
    log.info('Running subgradient method, %s steps, N=%d', schedule.name, N)
    steps = []
    frozen = False
    for k in range(1, N + 1):
        f_k, g = oracle(x)
        if not frozen and _at_optimum(f_k, oracle.f_star):
            log.info('Optimal value reached at k=%d, freezing iterates', k)
            frozen = True
        if frozen:
            h = 0.
            x_next = x
        else:
            h = schedule.step_size(k, N, f_k, oracle.f_star, float(g.dot(g)))
            x_next = domain.project(x - h * g)
        log.debug('k=%d f=%.17g h=%.17g', k, f_k, h)
        steps.append(Step(k, x, f_k, g, h, None))
        x = x_next
    f_last, g_last = oracle(x)
    log.info('Last value f(x^%d) = %.12g', N + 1, f_last)
    return RunTrace(steps, x, f_last, g_last, schedule.name)


def momentum_polyak_method(oracle, domain, x1, N):
    """Polyak step (f(x^k) - f*) / ((k+1) B^2) with momentum (k-1)/(k+1) (x^k - x^{k-1}).

    Starts from x^0 = x^1. B is the oracle's declared subgradient bound.

    """
    domain = domain or WholeSpace()
    x = as_vector(x1, 'x1')
    _check_start(domain, x, N)
    if oracle.f_star is None:
        raise MissingOptimalValue('momentum Polyak method needs the optimal value f_star')
    bound = oracle.subgradient_bound
    if not bound:
        raise MissingSubgradientBound('momentum Polyak method needs a positive subgradient bound B')
    log.info('Running momentum Polyak method, B=%g, N=%d', bound, N)
    steps = []
    x_prev = x
    for k in range(1, N + 1):
        f_k, g = oracle(x)
        h = _gap(f_k, oracle.f_star) / ((k + 1) * bound ** 2)
        momentum = ((k - 1.) / (k + 1.)) * (x - x_prev)
        x_next = domain.project(x - h * g + momentum)
        log.debug('k=%d f=%.17g h=%.17g', k, f_k, h)
        steps.append(Step(k, x, f_k, g, h, momentum))
        x_prev, x = x, x_next
    f_last, g_last = oracle(x)
    log.info('Last value f(x^%d) = %.12g', N + 1, f_last)
    return RunTrace(steps, x, f_last, g_last, 'momentum-polyak')
