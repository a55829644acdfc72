import collections
import logging

import numpy as np

from .errors import DomainError, EmptySetList, InfeasibleStart
from .linalg import as_vector
from .oracles import max_distance_set


log = logging.getLogger('polyak_rates.feasibility')


"""Projection methods for finding a point in an intersection of convex sets."""


FEASIBILITY_TOL = 1e-10
SUPPORT_TOL = 1e-12


class FeasibilityInstance(object):

    """Sets C_1..C_m, a starting point, and optionally a point of the intersection.

    R bounds ||x^1 - x*||; when not given it is computed from known_solution.

    """

    def __init__(self, sets, x1, known_solution=None, R=None):
        if not sets:
            raise EmptySetList('feasibility instance needs at least one set')
        self.sets = list(sets)
        self.x1 = as_vector(x1, 'x1')
        for convex_set in self.sets:
            convex_set.distance(self.x1)
        self.known_solution = None
        if known_solution is not None:
            self.known_solution = as_vector(known_solution, 'known_solution')
            for index, convex_set in enumerate(self.sets):
                distance = convex_set.distance(self.known_solution)
                if distance > FEASIBILITY_TOL:
                    raise DomainError('known solution is at distance %.3e from set %d'
                                      % (distance, index))
        if R is not None and not R > 0:
            raise DomainError('R must be positive, got %r' % R)
        self._R = None if R is None else float(R)

    @property
    def R(self):
        if self._R is None and self.known_solution is not None:
            return float(np.linalg.norm(self.x1 - self.known_solution))
        return self._R

    @property
    def dimension(self):
        return self.x1.shape[0]

    def __len__(self):
        return len(self.sets)

    def __repr__(self):
        return '<%s sets=%d, dimension=%d>' % (self.__class__.__name__, len(self), self.dimension)


class FeasStep(collections.namedtuple('FeasStep', ['k', 'x', 'index', 'distance', 'projection'])):

    """Iterate x^k, the chosen set index i_k, its distance, and the projection onto it."""

    __slots__ = ()

    def __repr__(self):
        return '<FeasStep k=%d index=%d distance=%r>' % (self.k, self.index, self.distance)


class FeasTrace(object):

    def __init__(self, steps, x_last, last_distance, method=None):
        self.steps = list(steps)
        self.x_last = x_last
        self.last_distance = last_distance
        self.method = method

    @property
    def N(self):
        return len(self.steps)

    @property
    def iterates(self):
        return np.array([step.x for step in self.steps] + [self.x_last])

    @property
    def distances(self):
        return np.array([step.distance for step in self.steps] + [self.last_distance])

    def distances_to(self, point):
        return np.linalg.norm(self.iterates - as_vector(point, 'point'), axis=1)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __repr__(self):
        return '<%s method=%s N=%d last_distance=%r>' % (self.__class__.__name__, self.method,
                                                         self.N, self.last_distance)


def _plain_step(x, x_prev, projection, k, N):
    return x - (x - projection)


def _adaptive_step(x, x_prev, projection, k, N):
    return x - ((N + 1. - k) / (N + 1.)) * (x - projection)


def _momentum_step(x, x_prev, projection, k, N):
    return x - (1. / (k + 1.)) * (x - projection) + ((k - 1.) / (k + 1.)) * (x - x_prev)


GREEDY_VARIANTS = {
    'plain': _plain_step,
    'adaptive': _adaptive_step,
    'momentum': _momentum_step,
}


def _check_iterations(N):
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise DomainError('number of iterations must be a positive integer, got %r' % N)


def greedy_method(instance, N, variant='adaptive'):
    """Project towards the farthest set each iteration.

    plain moves all the way onto it, adaptive moves the fraction (N+1-k)/(N+1),
    momentum moves 1/(k+1) of the way and adds (k-1)/(k+1) (x^k - x^{k-1}).
    Ties in the farthest set go to the smallest index.

    """
    try:
        update = GREEDY_VARIANTS[variant]
    except KeyError:
        raise DomainError('unknown greedy variant %r, expected one of %s'
                          % (variant, ', '.join(sorted(GREEDY_VARIANTS))))
    _check_iterations(N)
    log.info('Running %s greedy projections on %d sets, N=%d', variant, len(instance), N)
    sets = instance.sets
    x = x_prev = instance.x1
    steps = []
    for k in range(1, N + 1):
        index, distance = max_distance_set(sets, x)
        projection = sets[index].project(x)
        log.debug('k=%d set=%d distance=%.17g', k, index, distance)
        steps.append(FeasStep(k, x, index, distance, projection))
        x_prev, x = x, update(x, x_prev, projection, k, N)
    index, distance = max_distance_set(sets, x)
    log.info('Last max distance %.12g', distance)
    return FeasTrace(steps, x, distance, '%s-greedy' % variant)


def alternating_projection(C1, C2, x1, N):
    """x^{k+1} = P_C2(P_C1(x^k)) starting from x^1 in C2; distances are to C1."""
    x = as_vector(x1, 'x1')
    _check_iterations(N)
    start_distance = C2.distance(x)
    if start_distance > FEASIBILITY_TOL:
        raise InfeasibleStart('starting point is at distance %.3e from the second set'
                              % start_distance)
    log.info('Running alternating projections, N=%d', N)
    steps = []
    for k in range(1, N + 1):
        projection = C1.project(x)
        distance = float(np.linalg.norm(x - projection))
        steps.append(FeasStep(k, x, 0, distance, projection))
        x = C2.project(projection)
    distance = C1.distance(x)
    log.info('Last distance to the first set %.12g', distance)
    return FeasTrace(steps, x, distance, 'altproj')


def support_sizes(trace, tol=SUPPORT_TOL):
    """Number of coordinates with |x_i| > tol, for each iterate x^1..x^{N+1}."""
    return [int(np.count_nonzero(np.abs(x) > tol)) for x in trace.iterates]


def check_support_growth(trace, tol=SUPPORT_TOL):
    """True when iterate x^k has at most k-1 nonzero coordinates, for every k."""
    return all(size <= k - 1 for k, size in enumerate(support_sizes(trace, tol), 1))
