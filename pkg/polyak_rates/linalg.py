import collections
import logging
import math

import numpy as np
from scipy import linalg as sla

from .errors import (DimensionMismatch, NonFiniteValue, NonPositiveBase,
                     NotPositiveDefinite, SingularMatrix, NoConvergence)


log = logging.getLogger('polyak_rates.linalg')


"""Small dense linear algebra: factorization, triangular solves, eigenvalues, log-space products."""


PIVOT_TOL = 1e-13   # relative to the largest diagonal entry
JACOBI_TOL = 1e-11  # off-diagonal Frobenius mass
MAX_SWEEPS = 100


def as_vector(values, name='vector'):
    """Return values as a read-only 1-D float64 array with finite entries."""
    vector = np.array(values, dtype=float)
    if vector.ndim != 1:
        raise DimensionMismatch('%s must be one-dimensional, got shape %s' % (name, vector.shape))
    if not np.all(np.isfinite(vector)):
        raise NonFiniteValue('%s has non-finite entries' % name)
    vector.setflags(write=False)
    return vector


def _as_square(entries, name):
    entries = np.array(entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or not entries.shape[0]:
        raise DimensionMismatch('%s must be a non-empty square matrix, got shape %s'
                                % (name, entries.shape))
    if not np.all(np.isfinite(entries)):
        raise NonFiniteValue('%s has non-finite entries' % name)
    return entries


class SymMatrix(collections.namedtuple('SymMatrix', ['entries'])):

    """Dense symmetric matrix.

    Only the upper triangle of the given entries is read; the lower triangle
    is mirrored from it so that entries[i, j] == entries[j, i] exactly.

    """

    __slots__ = ()

    def __new__(cls, entries):
        entries = _as_square(entries, 'SymMatrix')
        entries = np.triu(entries) + np.triu(entries, 1).T
        entries.setflags(write=False)
        return super(SymMatrix, cls).__new__(cls, entries)

    @property
    def order(self):
        return self.entries.shape[0]

    def __repr__(self):
        return '<%s order=%d>' % (self.__class__.__name__, self.order)


class UpperTriangular(collections.namedtuple('UpperTriangular', ['entries'])):

    """Dense upper triangular matrix, strictly-lower part exactly zero."""

    __slots__ = ()

    def __new__(cls, entries):
        entries = np.triu(_as_square(entries, 'UpperTriangular'))
        entries.setflags(write=False)
        return super(UpperTriangular, cls).__new__(cls, entries)

    @property
    def order(self):
        return self.entries.shape[0]

    def __repr__(self):
        return '<%s order=%d>' % (self.__class__.__name__, self.order)


def identity(order):
    return SymMatrix(np.eye(order))


def cholesky_upper(matrix, pivot_tol=PIVOT_TOL):
    """Return upper triangular R with R^T R = matrix.

    Raises NotPositiveDefinite when a pivot R_ii^2 falls to pivot_tol times the
    largest diagonal entry or below.

    """
    entries = matrix.entries
    threshold = pivot_tol * max(float(np.max(np.diag(entries))), 0.)
    try:
        factor = sla.cholesky(entries, lower=False, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite('matrix of order %d is not positive definite: %s'
                                  % (matrix.order, exc))
    pivots = np.diag(factor) ** 2
    if np.any(pivots <= threshold):
        index = int(np.argmax(pivots <= threshold))
        raise NotPositiveDefinite('pivot %d is %.3e, threshold %.3e'
                                  % (index, pivots[index], threshold))
    return UpperTriangular(factor)


def solve_upper_transposed(factor, rhs):
    """Solve R^T x = rhs by forward substitution."""
    rhs = as_vector(rhs, 'rhs')
    if rhs.shape[0] != factor.order:
        raise DimensionMismatch('rhs has dimension %d, matrix has order %d'
                                % (rhs.shape[0], factor.order))
    if np.any(np.diag(factor.entries) == 0.):
        raise SingularMatrix('triangular factor has a zero diagonal entry')
    solution = sla.solve_triangular(factor.entries, rhs, trans='T', lower=False,
                                    check_finite=False)
    return as_vector(solution, 'solution')


def _round_robin(order):
    """Yield (p, q) index arrays of disjoint pairs; together the rounds cover every pair once."""
    players = list(range(order))
    if order % 2:
        players.append(None)
    count = len(players)
    for _ in range(count - 1):
        pairs = [sorted((players[i], players[count - 1 - i])) for i in range(count // 2)
                 if players[i] is not None and players[count - 1 - i] is not None]
        yield (np.array([p for p, q in pairs], dtype=int),
               np.array([q for p, q in pairs], dtype=int))
        players = [players[0], players[-1]] + players[1:-1]


def _off_diagonal_mass(entries):
    return np.linalg.norm(entries - np.diag(np.diag(entries)))


def eigenvalues(matrix, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS):
    """Return all eigenvalues in ascending order using cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round act on disjoint index pairs and can be
    applied together. Iteration stops once the off-diagonal Frobenius mass is
    below tol, which bounds the absolute error of every eigenvalue by tol.

    """
    entries = np.array(matrix.entries)
    order = matrix.order
    rounds = list(_round_robin(order))
    for sweep in range(max_sweeps):
        off = _off_diagonal_mass(entries)
        if off < tol:
            log.debug('Jacobi converged after %d sweeps, off-diagonal mass %.3e', sweep, off)
            return np.sort(np.diag(entries))
        for p, q in rounds:
            apq = entries[p, q]
            with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
                theta = (entries[q, q] - entries[p, p]) / (2. * apq)
                t = np.where(theta >= 0, 1., -1.) / (np.abs(theta) + np.sqrt(theta ** 2 + 1.))
            t = np.where(apq == 0., 0., t)
            c = 1. / np.sqrt(t ** 2 + 1.)
            s = t * c
            cols_p = entries[:, p].copy()
            cols_q = entries[:, q].copy()
            entries[:, p] = cols_p * c - cols_q * s
            entries[:, q] = cols_p * s + cols_q * c
            rows_p = entries[p, :].copy()
            rows_q = entries[q, :].copy()
            entries[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            entries[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            entries[p, q] = 0.
            entries[q, p] = 0.
    raise NoConvergence('Jacobi did not converge in %d sweeps (off-diagonal mass %.3e)'
                        % (max_sweeps, _off_diagonal_mass(entries)))


def min_eigenvalue(matrix, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS):
    return float(eigenvalues(matrix, tol, max_sweeps)[0])


def log_product(terms):
    """Return sum of exponent * ln(base) over (base, exponent) terms.

    The caller exponentiates; an empty product gives 0.

    """
    terms = list(terms)
    if not terms:
        return 0.
    bases, exponents = (np.array(values, dtype=float) for values in zip(*terms))
    if not np.all(bases > 0):
        raise NonPositiveBase('log_product needs strictly positive bases')
    return math.fsum(exponents * np.log(bases))
