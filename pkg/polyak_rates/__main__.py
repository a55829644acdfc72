import argparse
import sys

from .main import (DIMENSION, FEAS_METHOD, FEAS_METHODS, ITERS, JOBS, PIECES, PROJECT,
                   SEED_VARIABLE, SET_COUNT, SOLVER, SOLVERS, SWEEPS)
from .main import main


def build_parser():
    parser = argparse.ArgumentParser(
        prog='polyak_rates',
        description="Polyak-type subgradient and projection methods with exact worst-case rates")

    parser.add_argument('-v', '--verbose', action='store_true', default=False,
                        help="be more verbose")

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    command = commands.add_parser('run', help="run a subgradient method on an instance")
    command.add_argument('--instance', metavar='PATH', required=True,
                         help="piecewise_affine instance file")
    command.add_argument('--solver', default=SOLVER,
                         help="one of %s, default: %%(default)s" % ', '.join(SOLVERS))
    command.add_argument('--iters', type=int, metavar='N', default=ITERS,
                         help="number of iterations, default: %(default)s")
    command.add_argument('--project', default=PROJECT,
                         help="domain: none, ball=r[:c1,c2..] or halfspace=a1,a2..:b, "
                              "default: %(default)s")
    command.add_argument('--trace', metavar='PATH',
                         help="trace output file (JSON lines)")

    command = commands.add_parser('feas', help="run a projection method on a feasibility instance")
    command.add_argument('--instance', metavar='PATH', required=True,
                         help="feasibility instance file")
    command.add_argument('--method', choices=sorted(FEAS_METHODS), default=FEAS_METHOD,
                         help="projection method, default: %(default)s")
    command.add_argument('--iters', type=int, metavar='N', default=ITERS,
                         help="number of iterations, default: %(default)s")
    command.add_argument('--trace', metavar='PATH',
                         help="trace output file (JSON lines)")

    command = commands.add_parser('bound', help="print a worst-case rate")
    command.add_argument('--which', choices=['polyak', 'optimal', 'altproj'], required=True)
    command.add_argument('--N', type=int, required=True,
                         help="number of iterations")
    command.add_argument('--B', type=float, default=1.,
                         help="subgradient bound, default: %(default)s")
    command.add_argument('--R', type=float, default=1.,
                         help="initial distance bound, default: %(default)s")

    command = commands.add_parser('worstcase', help="build a tight instance, run it, report the gap")
    command.add_argument('--which', choices=['polyak', 'altproj', 'feasibility'], required=True)
    command.add_argument('--N', type=int, required=True,
                         help="number of iterations")
    command.add_argument('--out', metavar='DIR', required=True,
                         help="output directory for instance, trace and report")

    command = commands.add_parser('certify', help="check the multiplier inequality on a trace")
    command.add_argument('--trace', metavar='PATH', required=True)
    command.add_argument('--instance', metavar='PATH', required=True)
    command.add_argument('--v', default='auto-constant',
                         help="auto-constant, auto-polyak or a JSON multipliers FILE, "
                              "default: %(default)s")
    command.add_argument('--h-last', dest='h_last', type=float, metavar='H',
                         help="h_{N+1}, default: from the multipliers, else 1")

    command = commands.add_parser('sweep', help="write predicted vs achieved rates as CSV")
    command.add_argument('--which', choices=sorted(SWEEPS), required=True)
    command.add_argument('--n-min', dest='n_min', type=int, default=1,
                         help="default: %(default)s")
    command.add_argument('--n-max', dest='n_max', type=int, required=True)
    command.add_argument('--csv', metavar='PATH', required=True)
    command.add_argument('-j', '--jobs', type=int, default=JOBS,
                         help="worker processes, default: %(default)s")

    command = commands.add_parser('generate',
                                  help="write a random instance, seeded by %s" % SEED_VARIABLE)
    command.add_argument('--which', choices=['piecewise-affine', 'feasibility'], required=True)
    command.add_argument('--dimension', type=int, default=DIMENSION,
                         help="default: %(default)s")
    command.add_argument('--pieces', type=int, default=PIECES,
                         help="supporting pieces for piecewise-affine, default: %(default)s")
    command.add_argument('--count', type=int, default=SET_COUNT,
                         help="number of sets for feasibility, default: %(default)s")
    command.add_argument('--out', metavar='PATH', required=True)

    return parser


if __name__ == '__main__':
    parser = build_parser()
    args = parser.parse_args()
    sys.exit(main(args))
