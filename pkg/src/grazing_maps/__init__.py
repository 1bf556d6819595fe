"""Zero-time and Poincare discontinuity mappings near order-4 grazing points."""
from .dmaps import (
    DmResult,
    delta0_asymptotic,
    delta_asymptotic,
    pdm_analytic,
    pdm_numeric,
    v_leading,
    zdm_analytic,
    zdm_numeric,
)
from .flow import EventHit, Trajectory, first_crossing, integrate
from .grazing import GrazingReport, Pi3Point, classify, pi3_point
from .jets import JetValue
from .lie import LieTable, lie_derivatives, lie_fd_check, lie_mixed
from .perturb import PerturbedRootFamily, brute_root_oracle, perturbed_roots
from .sysdsl import ExpressionSystem, eval_expr, eval_jet, format_system, parse_system
from .systems import BuiltinSystem, builtin

__version__ = "0.1.0"
