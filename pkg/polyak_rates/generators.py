import collections
import logging

import numpy as np

from .errors import DomainError
from .feasibility import FeasibilityInstance
from .oracles import Ball, Halfspace, Hyperplane, PiecewiseAffine, SubgradientOracle


log = logging.getLogger('polyak_rates.generators')


"""Random test instances whose solutions are known by construction."""


SET_KINDS = ('hyperplane', 'halfspace', 'ball')


class RandomProblem(collections.namedtuple('RandomProblem', [
        'function', 'x1', 'x_star', 'f_star', 'B'])):

    __slots__ = ()

    @property
    def R(self):
        return float(np.linalg.norm(self.x1 - self.x_star))

    def oracle(self):
        return SubgradientOracle.from_piecewise_affine(self.function, self.f_star, self.B)


def random_piecewise_affine(rng, dimension, pieces, inactive=0, spread=3.):
    """Max of affine pieces with minimizer x* and optimal value f* known.

    The `pieces` supporting pieces all pass through (x*, f*) and their slopes
    have 0 as a strictly positive convex combination, so x* is a minimizer.
    The `inactive` extra pieces lie strictly below f* at x*.

    """
    if dimension < 1 or pieces < 1 or inactive < 0:
        raise DomainError('need dimension >= 1, pieces >= 1, inactive >= 0')
    x_star = rng.normal(size=dimension)
    f_star = float(rng.normal())
    slopes = rng.normal(size=(pieces - 1, dimension))
    weights = rng.uniform(0.1, 1., size=pieces)
    closing = -weights[:-1].dot(slopes) / weights[-1]
    slopes = np.vstack([slopes, closing])
    offsets = f_star - slopes.dot(x_star)
    if inactive:
        extra = rng.normal(size=(inactive, dimension))
        slopes = np.vstack([slopes, extra])
        offsets = np.append(offsets, f_star - extra.dot(x_star) - rng.uniform(0.1, 1., size=inactive))
    order = rng.permutation(len(offsets))
    function = PiecewiseAffine(slopes[order], offsets[order])
    x1 = x_star + spread * rng.normal(size=dimension)
    B = float(np.max(np.linalg.norm(slopes, axis=1)))
    log.debug('Random piecewise affine: dimension=%d pieces=%d inactive=%d', dimension,
              pieces, inactive)
    return RandomProblem(function, x1, x_star, f_star, B)


def _random_set(rng, kind, point):
    dimension = point.shape[0]
    if kind == 'ball':
        center = point + rng.normal(size=dimension)
        return Ball(center, np.linalg.norm(center - point) + rng.uniform(0., 0.5))
    normal = rng.normal(size=dimension)
    if kind == 'halfspace':
        return Halfspace(normal, normal.dot(point) + rng.uniform(0., 1.))
    return Hyperplane(normal, normal.dot(point))


def random_feasibility(rng, dimension, count, kinds=SET_KINDS, spread=3.):
    """Sets of the given kinds sharing a known common point."""
    if dimension < 1 or count < 1:
        raise DomainError('need dimension >= 1 and count >= 1')
    point = rng.normal(size=dimension)
    sets = [_random_set(rng, kinds[rng.integers(len(kinds))], point) for _ in range(count)]
    x1 = point + spread * rng.normal(size=dimension)
    return FeasibilityInstance(sets, x1, known_solution=point)


def random_set_pair(rng, dimension, kinds=SET_KINDS, spread=3.):
    """Two sets with a known common point, x^1 placed in the second one."""
    instance = random_feasibility(rng, dimension, 2, kinds, spread)
    C1, C2 = instance.sets
    x1 = C2.project(instance.x1)
    return FeasibilityInstance([C1, C2], x1, known_solution=instance.known_solution)
