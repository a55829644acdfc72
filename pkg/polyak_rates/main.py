import csv
import json
import logging
import math
import multiprocessing
import os

import numpy as np

from . import errors
from . import feasibility
from . import generators
from . import loaders
from . import solvers
from . import theory
from .linalg import as_vector
from .oracles import Ball, Halfspace, WholeSpace, distance_oracle


log = logging.getLogger('polyak_rates.main')


ITERS = 20
SOLVER = 'polyak'
PROJECT = 'none'
FEAS_METHOD = 'adaptive-greedy'
H_LAST = 1.
JOBS = 1
DIMENSION = 5
PIECES = 4
SET_COUNT = 3

SEED_VARIABLE = 'SUBGRAD_SEED'

CERTIFICATE_TOL = 1e-9

INSTANCE_FILE = 'instance.json'
TRACE_FILE = 'trace.jsonl'
REPORT_FILE = 'report.json'
MULTIPLIERS_FILE = 'multipliers.json'

CSV_HEADER = ['N', 'predicted', 'achieved', 'gap']

FEAS_METHODS = {
    'greedy': 'plain',
    'adaptive-greedy': 'adaptive',
    'momentum-greedy': 'momentum',
    'altproj': None,
}

# solver name -> rate bound on f(x^{N+1}) - f*, or None
SOLVER_BOUNDS = {
    'polyak': theory.rate_polyak,
    'adaptive-polyak': theory.rate_optimal,
    'momentum-polyak': theory.rate_optimal,
    'presized': theory.rate_optimal,
}

SOLVERS = ['polyak', 'polyak-t=T', 'adaptive-polyak', 'momentum-polyak', 'presized=R', 'fixed=H']


def seed_from_env(environ=None):
    environ = os.environ if environ is None else environ
    value = environ.get(SEED_VARIABLE, '0')
    try:
        seed = int(value)
    except ValueError:
        seed = -1
    if seed < 0:
        raise errors.ParseError('%s must be an unsigned integer, got %r' % (SEED_VARIABLE, value))
    return seed


def _split_option(text):
    name, _, param = text.partition('=')
    return name, param


def _parse_float(text, what):
    try:
        return float(text)
    except ValueError:
        raise errors.ParseError('%s must be a number, got %r' % (what, text))


def _parse_floats(text, what):
    return [_parse_float(item, what) for item in text.split(',') if item]


def parse_solver(text):
    """'polyak-t=1.5' -> (name, schedule or None for the momentum method)"""
    name, param = _split_option(text)
    if name == 'momentum-polyak':
        return name, None
    schedule_cls = solvers.SCHEDULES.get(name)
    if schedule_cls is None:
        raise errors.ParseError('unknown solver %r, expected one of %s' % (text, ', '.join(SOLVERS)))
    if name in ('polyak', 'adaptive-polyak'):
        if param:
            raise errors.ParseError('solver %s takes no parameter' % name)
        return name, schedule_cls()
    if not param:
        raise errors.ParseError('solver %s needs a parameter, like %s=1' % (name, name))
    return name, schedule_cls(_parse_float(param, name))


def parse_domain(text, dimension):
    """'none', 'ball=r[:c1,c2..]' or 'halfspace=a1,a2..:b'"""
    name, param = _split_option(text)
    if name == 'none':
        return WholeSpace(dimension)
    values, _, tail = param.partition(':')
    if name == 'ball':
        center = _parse_floats(tail, 'ball center') if tail else np.zeros(dimension)
        return Ball(center, _parse_float(values, 'ball radius'))
    if name == 'halfspace':
        if not tail:
            raise errors.ParseError('halfspace needs a1,a2..:b')
        return Halfspace(_parse_floats(values, 'halfspace normal'), _parse_float(tail, 'halfspace bound'))
    raise errors.ParseError('unknown projection %r, expected none, ball=... or halfspace=...' % text)


def empirical_bound(trace):
    """Largest subgradient norm seen along the run, the last iterate included."""
    norms = [np.linalg.norm(g) for g in trace.subgradients]
    if trace.last_subgradient is not None:
        norms.append(np.linalg.norm(trace.last_subgradient))
    return float(max(norms))


def format_number(value):
    """12 significant digits, always with a decimal point or exponent: 1 -> '1.0'."""
    text = '%.12g' % value
    if text.lstrip('-').isdigit():
        text += '.0'
    return text


def _summary(name, value, bound, gap_name=None, gap=None):
    fields = [(name, value)]
    if gap_name is not None and gap is not None:
        fields.append((gap_name, gap))
        value = gap
    if bound is not None:
        fields += [('bound', bound), ('gap', bound - value)]
    return ' '.join('%s=%s' % (key, format_number(number)) for key, number in fields)


def run_problem(problem, solver, N, domain=None):
    """Run the named solver; return (trace, rate bound on the last gap or None)."""
    name, schedule = parse_solver(solver)
    oracle = problem.oracle()
    if schedule is None:
        trace = solvers.momentum_polyak_method(oracle, domain, problem.x1, N)
    else:
        trace = solvers.subgradient_method(oracle, domain, problem.x1, N, schedule)
    rate = SOLVER_BOUNDS.get(name)
    R = problem.radius
    if name == 'presized':
        R = schedule.R
    if rate is None or R is None or problem.f_star is None:
        return trace, None
    B = problem.B if problem.B else empirical_bound(trace)
    if not B > 0:
        return trace, None
    return trace, rate(N, B, R)


def cmd_run(args):
    problem = loaders.read_instance(args.instance)
    if not isinstance(problem, loaders.Problem):
        raise errors.ParseError('run needs a piecewise_affine instance, use feas for feasibility')
    domain = parse_domain(args.project, problem.function.dimension)
    trace, bound = run_problem(problem, args.solver, args.iters, domain)
    if args.trace:
        loaders.write_trace(args.trace, trace)
    last_gap = None
    if problem.f_star is not None:
        last_gap = trace.f_last - problem.f_star
    print(_summary('last_f', trace.f_last, bound, 'last_gap', last_gap))
    return 0


def run_feasibility(instance, method, N):
    """Run the named projection method; return (trace, rate bound on the last distance or None)."""
    try:
        variant = FEAS_METHODS[method]
    except KeyError:
        raise errors.ParseError('unknown method %r, expected one of %s'
                                % (method, ', '.join(sorted(FEAS_METHODS))))
    R = instance.R
    if variant is None:
        if len(instance) != 2:
            raise errors.LengthMismatch('altproj needs exactly two sets, got %d' % len(instance))
        trace = feasibility.alternating_projection(instance.sets[0], instance.sets[1], instance.x1, N)
        return trace, None if R is None else theory.rate_altproj(N, R)
    trace = feasibility.greedy_method(instance, N, variant)
    if variant == 'plain' or R is None:
        return trace, None
    return trace, R / math.sqrt(N + 1)


def cmd_feas(args):
    instance = loaders.read_instance(args.instance)
    if not isinstance(instance, feasibility.FeasibilityInstance):
        raise errors.ParseError('feas needs a feasibility instance, use run for piecewise_affine')
    trace, bound = run_feasibility(instance, args.method, args.iters)
    if args.trace:
        loaders.write_trace(args.trace, trace)
    print(_summary('last_distance', trace.last_distance, bound))
    return 0


def cmd_bound(args):
    if args.which == 'altproj':
        value = theory.rate_altproj(args.N, args.R)
    elif args.which == 'optimal':
        value = theory.rate_optimal(args.N, args.B, args.R)
    else:
        value = theory.rate_polyak(args.N, args.B, args.R)
    print(format_number(value))
    return 0


def worstcase(which, N):
    """Build a tight instance and run its method: (instance, trace, predicted, achieved)."""
    if which == 'polyak':
        tight = theory.build_polyak_tight_instance(N)
        problem = loaders.Problem(tight.function, tight.x1, tight.f_star, 1., tight.x_star, 1.)
        trace = solvers.subgradient_method(problem.oracle(), None, problem.x1, N, solvers.Polyak())
        return problem, trace, tight.predicted_last_value, trace.f_last - tight.f_star
    if which == 'altproj':
        pair = theory.build_altproj_tight_instance(N)
        trace = feasibility.alternating_projection(pair.C1, pair.C2, pair.x1, N)
        return pair.as_feasibility(), trace, pair.predicted, trace.last_distance
    if which == 'feasibility':
        instance = theory.build_feasibility_resisting_instance(N, 1.)
        trace = feasibility.greedy_method(instance, N, 'adaptive')
        return instance, trace, 1. / math.sqrt(N + 1), trace.last_distance
    if which == 'adaptive-bound':
        instance = theory.build_feasibility_resisting_instance(N, 1.)
        trace = solvers.subgradient_method(distance_oracle(instance.sets), None, instance.x1, N,
                                           solvers.AdaptivePolyak())
        return instance, trace, theory.rate_optimal(N, 1., 1.), trace.f_last
    raise errors.ParseError('unknown worst case %r' % which)


def _write_json(fn, document):
    log.info('Writing: %s', fn)
    with open(fn, 'w') as out:
        json.dump(document, out, indent=1)
        out.write('\n')


def cmd_worstcase(args):
    instance, trace, predicted, achieved = worstcase(args.which, args.N)
    if not os.path.isdir(args.out):
        os.makedirs(args.out)
    loaders.write_instance(os.path.join(args.out, INSTANCE_FILE), instance)
    loaders.write_trace(os.path.join(args.out, TRACE_FILE), trace)
    if args.which == 'polyak':
        v, h_last = theory.polyak_certificate_multipliers(args.N)
        _write_json(os.path.join(args.out, MULTIPLIERS_FILE), {'v': v.tolist(), 'h_last': h_last})
    report = {
        'which': args.which,
        'N': args.N,
        'predicted': predicted,
        'achieved': achieved,
        'relative_gap': abs(predicted - achieved) / predicted,
    }
    _write_json(os.path.join(args.out, REPORT_FILE), report)
    print('predicted=%.12g achieved=%.12g relative_gap=%.3e'
          % (predicted, achieved, report['relative_gap']))
    return 0


def read_multipliers(fn):
    """A JSON list of v_0..v_{N+1}, or an object {"v": [...], "h_last": r}."""
    try:
        with open(fn, 'r') as multipliers_file:
            document = json.load(multipliers_file)
    except (IOError, OSError, ValueError) as exc:
        raise errors.ParseError('cannot read multipliers file %s: %s' % (fn, exc))
    h_last = None
    if isinstance(document, dict):
        if 'v' not in document:
            raise errors.ParseError('multipliers file is missing field %r' % 'v')
        h_last = document.get('h_last')
        document = document['v']
    try:
        v = as_vector(document, 'v')
        if h_last is not None:
            h_last = float(h_last)
    except errors.Error:
        raise
    except (TypeError, ValueError):
        raise errors.ParseError('multipliers file %s must hold numbers, got v=%r h_last=%r'
                                % (fn, document, h_last))
    return v, h_last


def cmd_certify(args):
    trace = loaders.read_trace(args.trace)
    problem = loaders.read_instance(args.instance)
    if not isinstance(problem, loaders.Problem):
        raise errors.ParseError('certify needs a piecewise_affine instance')
    if problem.x_star is None:
        raise errors.ParseError('piecewise_affine instance is missing field %r' % 'x_star')
    if problem.f_star is None:
        raise errors.MissingOptimalValue('certificate needs the optimal value f_star')
    h_last = None
    if args.v == 'auto-constant':
        v = np.ones(trace.N + 2)
    elif args.v == 'auto-polyak':
        v, h_last = theory.polyak_certificate_multipliers(trace.N, problem.B or 1., problem.radius)
    else:
        v, h_last = read_multipliers(args.v)
    if args.h_last is not None:
        h_last = args.h_last
    if h_last is None:
        h_last = H_LAST
    certificate = theory.certificate_lemma1(trace, v, h_last, problem.x_star, problem.f_star,
                                            problem.oracle())
    print('slack=%.12g lhs=%.12g rhs=%.12g' % (certificate.slack, certificate.lhs, certificate.rhs))
    if certificate.slack >= -CERTIFICATE_TOL:
        return 0
    log.warning('Certificate fails by %.3e', -certificate.slack)
    return 1


def sweep_row(job):
    which, N = job
    _, _, predicted, achieved = worstcase(which, N)
    return N, predicted, achieved, predicted - achieved


SWEEPS = {
    'polyak-exact': 'polyak',
    'altproj-exact': 'altproj',
    'adaptive-bound': 'adaptive-bound',
}


def sweep(which, n_min, n_max, jobs=JOBS):
    """Rows (N, predicted, achieved, gap) for N = n_min..n_max, in N order."""
    if which not in SWEEPS:
        raise errors.ParseError('unknown sweep %r, expected one of %s'
                                % (which, ', '.join(sorted(SWEEPS))))
    if n_min < 1 or n_min > n_max:
        raise errors.DomainError('need 1 <= n-min <= n-max, got %d..%d' % (n_min, n_max))
    work = [(SWEEPS[which], N) for N in range(n_min, n_max + 1)]
    log.info('Sweeping %s over N=%d..%d with %d job(s)', which, n_min, n_max, jobs)
    if jobs > 1:
        pool = multiprocessing.Pool(jobs)
        try:
            return pool.map(sweep_row, work)
        finally:
            pool.close()
            pool.join()
    return [sweep_row(job) for job in work]


def cmd_sweep(args):
    rows = sweep(args.which, args.n_min, args.n_max, args.jobs)
    log.info('Writing: %s', args.csv)
    with open(args.csv, 'w') as csv_file:
        writer = csv.writer(csv_file, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
    return 0


def cmd_generate(args):
    seed = seed_from_env()
    rng = np.random.default_rng(seed)
    log.info('Generating %s instance, seed %d', args.which, seed)
    if args.which == 'feasibility':
        instance = generators.random_feasibility(rng, args.dimension, args.count)
    else:
        random_problem = generators.random_piecewise_affine(rng, args.dimension, args.pieces)
        instance = loaders.Problem(random_problem.function, random_problem.x1,
                                   random_problem.f_star, random_problem.B,
                                   random_problem.x_star, None)
    loaders.write_instance(args.out, instance)
    return 0


COMMANDS = {
    'run': cmd_run,
    'feas': cmd_feas,
    'bound': cmd_bound,
    'worstcase': cmd_worstcase,
    'certify': cmd_certify,
    'sweep': cmd_sweep,
    'generate': cmd_generate,
}


def main(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    logging.basicConfig(level=level,
                        format="%(asctime)s - %(levelname)s - %(message)s")

    try:
        return COMMANDS[args.command](args)
    except errors.Error as exc:
        log.error('%s', exc)
        return exc.exit_code
