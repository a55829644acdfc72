import collections
import json
import logging

import numpy as np

from .errors import DimensionMismatch, Error, ParseError
from .feasibility import FeasibilityInstance, FeasTrace
from .linalg import as_vector
from .oracles import SETS, PiecewiseAffine, SubgradientOracle
from .solvers import RunTrace, Step


log = logging.getLogger('polyak_rates.loaders')


"""Read and write instance files (JSON) and trace files (JSON lines).

Numbers are written with repr(), the shortest string that reads back to the
same double, so files round-trip bit-exactly.

"""


class Problem(collections.namedtuple('Problem', ['function', 'x1', 'f_star', 'B', 'x_star', 'R'])):

    """Piecewise affine minimization problem as stored in an instance file."""

    __slots__ = ()

    def oracle(self):
        return SubgradientOracle.from_piecewise_affine(self.function, self.f_star, self.B)

    @property
    def radius(self):
        """R if stored, else ||x1 - x_star|| if x_star is known, else None."""
        if self.R is not None:
            return self.R
        if self.x_star is not None:
            return float(np.linalg.norm(self.x1 - self.x_star))
        return None


def _field(document, name, kind):
    try:
        return document[name]
    except KeyError:
        raise ParseError('%s instance is missing field %r' % (kind, name))


def _number(value, name):
    if isinstance(value, bool):
        raise ParseError('field %r must be a number, got %r' % (name, value))
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError('field %r must be a number, got %r' % (name, value))


def _vector(value, name):
    try:
        return as_vector(value, name)
    except Error:
        raise
    except (TypeError, ValueError):
        raise ParseError('field %r must be a list of numbers, got %r' % (name, value))


def _optional_float(document, name):
    value = document.get(name)
    if value is None:
        return None
    return _number(value, name)


def _optional_vector(document, name):
    value = document.get(name)
    if value is None:
        return None
    return _vector(value, name)


def _vector_list(values):
    return None if values is None else [float(value) for value in values]


def _check_dimension(document, dimension, kind):
    declared = document.get('dimension')
    if declared is not None and declared != dimension:
        raise DimensionMismatch('%s instance declares dimension %r but has dimension %d'
                                % (kind, declared, dimension))


class PiecewiseAffineLoader(object):

    kind = 'piecewise_affine'

    def read(self, document):
        pieces = []
        for number, piece in enumerate(_field(document, 'pieces', self.kind)):
            try:
                slope, offset = piece['slope'], piece['offset']
            except (KeyError, TypeError):
                raise ParseError('every piece needs "slope" and "offset"')
            pieces.append((_vector(slope, 'pieces[%d].slope' % number),
                           _number(offset, 'pieces[%d].offset' % number)))
        dimensions = set(slope.shape[0] for slope, _ in pieces)
        if len(dimensions) > 1:
            raise DimensionMismatch('piece slopes have different dimensions: %s'
                                    % ', '.join(str(d) for d in sorted(dimensions)))
        function = PiecewiseAffine.from_pieces(pieces)
        _check_dimension(document, function.dimension, self.kind)
        x1 = _vector(_field(document, 'x1', self.kind), 'x1')
        x_star = _optional_vector(document, 'x_star')
        for name, point in (('x1', x1), ('x_star', x_star)):
            if point is not None and point.shape[0] != function.dimension:
                raise DimensionMismatch('%s has dimension %d, function has dimension %d'
                                        % (name, point.shape[0], function.dimension))
        return Problem(function, x1, _optional_float(document, 'f_star'),
                       _optional_float(document, 'B'), x_star, _optional_float(document, 'R'))

    def write(self, problem):
        function = problem.function
        document = collections.OrderedDict([
            ('kind', self.kind),
            ('dimension', function.dimension),
            ('pieces', [{'slope': slope.tolist(), 'offset': float(offset)}
                        for slope, offset in zip(function.slopes, function.offsets)]),
            ('x1', _vector_list(problem.x1)),
        ])
        for name in ('f_star', 'B', 'R'):
            value = getattr(problem, name)
            if value is not None:
                document[name] = float(value)
        if problem.x_star is not None:
            document['x_star'] = _vector_list(problem.x_star)
        return document


class FeasibilityLoader(object):

    kind = 'feasibility'

    def read_set(self, document):
        if not isinstance(document, dict):
            raise ParseError('every set must be a JSON object, got %r' % (document, ))
        params = dict(document)
        set_type = params.pop('type', None)
        try:
            set_cls = SETS[set_type]
        except (KeyError, TypeError):
            raise ParseError('unknown set type %r, expected one of %s'
                             % (set_type, ', '.join(sorted(SETS))))
        try:
            return set_cls(**params)
        except Error:
            raise
        except (TypeError, ValueError):
            settings = ', '.join('%s=%r' % item for item in sorted(params.items()))
            raise ParseError('bad parameters for %s set: %s' % (set_type, settings))

    def read(self, document):
        sets = [self.read_set(item) for item in _field(document, 'sets', self.kind)]
        x1 = _vector(_field(document, 'x1', self.kind), 'x1')
        _check_dimension(document, x1.shape[0], self.kind)
        return FeasibilityInstance(sets, x1, _optional_vector(document, 'x_star'),
                                   _optional_float(document, 'R'))

    def write(self, instance):
        sets = []
        for convex_set in instance.sets:
            item = collections.OrderedDict([('type', convex_set.kind)])
            item.update(sorted(convex_set.params().items()))
            sets.append(item)
        document = collections.OrderedDict([
            ('kind', self.kind),
            ('dimension', instance.dimension),
            ('sets', sets),
            ('x1', _vector_list(instance.x1)),
        ])
        if instance.known_solution is not None:
            document['x_star'] = _vector_list(instance.known_solution)
        if instance._R is not None:
            document['R'] = instance._R
        return document


LOADERS = {
    'piecewise_affine': PiecewiseAffineLoader(),
    'feasibility': FeasibilityLoader(),
}


def parse_instance(text):
    try:
        document = json.loads(text)
    except ValueError as exc:
        raise ParseError('instance file is not valid JSON: %s' % exc)
    if not isinstance(document, dict):
        raise ParseError('instance file must hold a JSON object')
    kind = document.get('kind')
    loader = LOADERS.get(kind) if isinstance(kind, str) else None
    if not loader:
        raise ParseError('unknown instance kind %r, expected one of %s'
                         % (kind, ', '.join(sorted(LOADERS))))
    try:
        return loader.read(document)
    except Error:
        raise
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError('malformed %s instance: %s' % (kind, exc))


def serialize_instance(instance):
    if isinstance(instance, FeasibilityInstance):
        loader = LOADERS['feasibility']
    else:
        loader = LOADERS['piecewise_affine']
    return json.dumps(loader.write(instance), indent=1) + '\n'


def read_instance(fn):
    log.info('Reading instance: %s', fn)
    try:
        with open(fn, 'r') as instance_file:
            text = instance_file.read()
    except (IOError, OSError) as exc:
        raise ParseError('cannot read instance file %s: %s' % (fn, exc))
    return parse_instance(text)


def write_instance(fn, instance):
    log.info('Writing instance: %s', fn)
    with open(fn, 'w') as instance_file:
        instance_file.write(serialize_instance(instance))


def trace_lines(trace):
    """Yield one JSON-ready dict per iterate x^1..x^{N+1}."""
    if isinstance(trace, FeasTrace):
        for step in trace:
            yield collections.OrderedDict([
                ('k', step.k), ('x', _vector_list(step.x)),
                ('index', step.index), ('distance', step.distance)])
        yield collections.OrderedDict([
            ('k', trace.N + 1), ('x', _vector_list(trace.x_last)),
            ('distance', trace.last_distance)])
        return
    for step in trace:
        line = collections.OrderedDict([
            ('k', step.k), ('x', _vector_list(step.x)), ('f', step.f),
            ('g', _vector_list(step.g)), ('h', step.h)])
        if step.momentum is not None:
            line['momentum'] = _vector_list(step.momentum)
        yield line
    yield collections.OrderedDict([
        ('k', trace.N + 1), ('x', _vector_list(trace.x_last)), ('f', trace.f_last)])


def write_trace(fn, trace):
    log.info('Writing trace: %s', fn)
    with open(fn, 'w') as trace_file:
        for line in trace_lines(trace):
            trace_file.write(json.dumps(line) + '\n')


def parse_trace(lines):
    """Rebuild a RunTrace from JSON lines; the last line holds x^{N+1}."""
    records = []
    for number, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except ValueError as exc:
            raise ParseError('trace line %d is not valid JSON: %s' % (number, exc))
    if not records:
        raise ParseError('trace file is empty')
    if not all(isinstance(record, dict) for record in records):
        raise ParseError('every trace line must hold a JSON object')
    ks = [record.get('k') for record in records]
    if ks != list(range(1, len(records) + 1)):
        raise ParseError('trace iteration numbers must run 1..%d' % len(records))
    try:
        steps = [Step(record['k'], _vector(record['x'], 'x'), _number(record['f'], 'f'),
                      _vector(record['g'], 'g'), _number(record['h'], 'h'),
                      _optional_vector(record, 'momentum'))
                 for record in records[:-1]]
        last = records[-1]
        return RunTrace(steps, _vector(last['x'], 'x'), _number(last['f'], 'f'))
    except KeyError as exc:
        raise ParseError('trace line is missing field %s' % exc)


def read_trace(fn):
    log.info('Reading trace: %s', fn)
    try:
        with open(fn, 'r') as trace_file:
            return parse_trace(trace_file)
    except (IOError, OSError) as exc:
        raise ParseError('cannot read trace file %s: %s' % (fn, exc))
