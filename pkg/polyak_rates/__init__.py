from .oracles import PiecewiseAffine, SubgradientOracle, WholeSpace, Hyperplane, Halfspace, Ball
from .solvers import subgradient_method, momentum_polyak_method, SCHEDULES
from .feasibility import FeasibilityInstance, greedy_method, alternating_projection
from .theory import rate_polyak, rate_optimal, rate_altproj, certificate_lemma1
