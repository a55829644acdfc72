import logging

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptySetList
from .linalg import as_vector


log = logging.getLogger('polyak_rates.oracles')


"""First-order oracles for convex functions, and convex sets with exact projections."""


ACTIVE_TOL = 1e-12  # relative: pieces within ACTIVE_TOL * (1 + |value|) of the max are active
BOUND_TOL = 1e-12


def _check_dimension(x, dimension, what):
    if dimension is not None and x.shape[0] != dimension:
        raise DimensionMismatch('%s has dimension %d, point has dimension %d'
                                % (what, dimension, x.shape[0]))


class PiecewiseAffine(object):

    """Convex function x -> max_k offset_k + <slope_k, x>.

    Pieces are indexed from 0 in the order given.

    """

    def __init__(self, slopes, offsets):
        slopes = np.array(slopes, dtype=float)
        offsets = as_vector(offsets, 'offsets')
        if slopes.ndim != 2 or not slopes.shape[0] or not slopes.shape[1]:
            raise DimensionMismatch('slopes must be a non-empty (pieces x dimension) array, '
                                    'got shape %s' % (slopes.shape, ))
        if slopes.shape[0] != offsets.shape[0]:
            raise DimensionMismatch('%d slopes but %d offsets'
                                    % (slopes.shape[0], offsets.shape[0]))
        if not np.all(np.isfinite(slopes)):
            raise DomainError('slopes have non-finite entries')
        slopes.setflags(write=False)
        self.slopes = slopes
        self.offsets = offsets

    @classmethod
    def from_pieces(cls, pieces):
        """Create from a sequence of (slope, offset) pairs."""
        pieces = list(pieces)
        if not pieces:
            raise DomainError('piecewise affine function needs at least one piece')
        slopes, offsets = zip(*pieces)
        return cls(slopes, offsets)

    @property
    def dimension(self):
        return self.slopes.shape[1]

    def __len__(self):
        return self.slopes.shape[0]

    def piece_values(self, x):
        x = as_vector(x, 'x')
        _check_dimension(x, self.dimension, 'function')
        return self.slopes.dot(x) + self.offsets

    def evaluate(self, x):
        """Return (value, active piece indices in ascending order)."""
        values = self.piece_values(x)
        value = float(np.max(values))
        active = np.flatnonzero(values >= value - ACTIVE_TOL * (1. + abs(value)))
        return value, [int(index) for index in active]

    def subgradient(self, x):
        """Return the slope of the active piece with the smallest index."""
        value, active = self.evaluate(x)
        return self.slopes[active[0]]

    def __call__(self, x):
        return self.evaluate(x)[0]

    def __repr__(self):
        return '<%s pieces=%d, dimension=%d>' % (self.__class__.__name__, len(self), self.dimension)


def pa_eval(function, x):
    return function.evaluate(x)


def pa_subgradient(function, x):
    return function.subgradient(x)


class SubgradientOracle(object):

    """Returns f(x) and one subgradient at x.

    f_star is the optimal value and subgradient_bound the bound B on subgradient
    norms; both are optional, but some methods require them.

    """

    def __init__(self, evaluator, f_star=None, subgradient_bound=None, dimension=None):
        if subgradient_bound is not None and not subgradient_bound >= 0:
            raise DomainError('subgradient bound must be nonnegative, got %r' % subgradient_bound)
        self.evaluator = evaluator
        self.f_star = None if f_star is None else float(f_star)
        self.subgradient_bound = None if subgradient_bound is None else float(subgradient_bound)
        self.dimension = dimension

    @classmethod
    def from_piecewise_affine(cls, function, f_star=None, subgradient_bound=None):
        def evaluator(x):
            value, active = function.evaluate(x)
            return value, function.slopes[active[0]]
        return cls(evaluator, f_star, subgradient_bound, function.dimension)

    def __call__(self, x):
        x = as_vector(x, 'x')
        _check_dimension(x, self.dimension, 'oracle')
        value, subgradient = self.evaluator(x)
        subgradient = as_vector(subgradient, 'subgradient')
        if (self.subgradient_bound is not None and
                np.linalg.norm(subgradient) > self.subgradient_bound + BOUND_TOL):
            log.warning('Subgradient norm %.6g exceeds declared bound %.6g',
                        np.linalg.norm(subgradient), self.subgradient_bound)
        return float(value), subgradient

    def __repr__(self):
        return '<%s f_star=%s, B=%s>' % (self.__class__.__name__, self.f_star,
                                         self.subgradient_bound)


class ConvexSet(object):

    """Base class for closed convex sets with closed-form Euclidean projection.

    Child classes must implement _project() and params().

    """

    kind = None
    dimension = None

    def _point(self, x):
        x = as_vector(x, 'x')
        _check_dimension(x, self.dimension, self.kind)
        return x

    def _project(self, x):
        raise NotImplementedError

    def params(self):
        """Return the parameters as a JSON-ready dict."""
        raise NotImplementedError

    def project(self, x):
        return as_vector(self._project(self._point(x)), 'projection')

    def distance(self, x):
        x = self._point(x)
        return float(np.linalg.norm(x - self._project(x)))

    def contains(self, x, tol=1e-10):
        return self.distance(x) <= tol

    def __repr__(self):
        return '<%s %s>' % (self.__class__.__name__, self.params())


class WholeSpace(ConvexSet):

    kind = 'whole_space'

    def __init__(self, dimension=None):
        self.dimension = dimension

    def _project(self, x):
        return x

    def params(self):
        return {'dimension': self.dimension}


class Hyperplane(ConvexSet):

    """{x: <a, x> = b}"""

    kind = 'hyperplane'

    def __init__(self, a, b):
        self.a = as_vector(a, 'a')
        self.b = float(b)
        self.dimension = self.a.shape[0]
        self._norm_sq = float(self.a.dot(self.a))
        if not self._norm_sq > 0:
            raise DomainError('%s normal must be nonzero' % self.kind)

    def _residual(self, x):
        return self.a.dot(x) - self.b

    def _project(self, x):
        return x - (self._residual(x) / self._norm_sq) * self.a

    def params(self):
        return {'a': self.a.tolist(), 'b': self.b}


class Halfspace(Hyperplane):

    """{x: <a, x> <= b}"""

    kind = 'halfspace'

    def _project(self, x):
        if self._residual(x) > 0:
            return Hyperplane._project(self, x)
        return x


class Ball(ConvexSet):

    """{x: ||x - center|| <= radius}"""

    kind = 'ball'

    def __init__(self, center, radius):
        self.center = as_vector(center, 'center')
        self.radius = float(radius)
        self.dimension = self.center.shape[0]
        if not self.radius >= 0:
            raise DomainError('ball radius must be nonnegative, got %r' % radius)

    def _project(self, x):
        offset = x - self.center
        norm = np.linalg.norm(offset)
        if norm <= self.radius:
            return x
        return self.center + self.radius * (offset / norm)

    def params(self):
        return {'center': self.center.tolist(), 'radius': self.radius}


SETS = {
    'whole_space': WholeSpace,
    'hyperplane': Hyperplane,
    'halfspace': Halfspace,
    'ball': Ball,
}


def project(convex_set, x):
    return convex_set.project(x)


def distance(convex_set, x):
    return convex_set.distance(x)


def max_distance_set(sets, x):
    """Return (index, distance) of the farthest set; ties go to the smallest index."""
    if not sets:
        raise EmptySetList('need at least one set')
    distances = [convex_set.distance(x) for convex_set in sets]
    index = int(np.argmax(distances))
    return index, distances[index]


def distance_oracle(sets):
    """Oracle for x -> max_i d_{C_i}(x), a 1-Lipschitz convex function with optimal value 0.

    The subgradient at the farthest set C is (x - P_C(x)) / d_C(x), and zero
    when x lies in every set.

    """
    if not sets:
        raise EmptySetList('need at least one set')

    def evaluator(x):
        index, value = max_distance_set(sets, x)
        if value == 0.:
            return 0., np.zeros_like(x)
        return value, (x - sets[index].project(x)) / value

    return SubgradientOracle(evaluator, f_star=0., subgradient_bound=1.,
                             dimension=sets[0].dimension)
