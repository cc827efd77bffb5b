"""Exact nested Bethe vectors for evaluation modules of the Yangian Y(gl_n).

The direct evaluator (:func:`bethe_direct`) reads ``B_xi(t) v`` off the
ordered T- and R-products.  :func:`splitting_rhs`, :func:`uprop_rhs` and
:func:`mainth_rhs` rebuild the same vector through the ``gl_m + gl_{n-m}``
splitting, and :func:`bethe_recursive` iterates the combinatorial formula
down to rank one.  All arithmetic is over exact rationals.
"""

from .checks import CHECK_NAMES, BudgetExceeded, CheckSpec, InvalidConfig, run_check
from .exact import (
    PoleError,
    Rational,
    ResampleExhausted,
    Shape,
    VarAssignment,
    rational,
    sample_assignment,
    symmetrize,
)
from .nested import (
    InvalidPlan,
    bethe_recursive,
    mainth_rhs,
    splitting_rhs,
    uprop_rhs,
    xi_m_zero_rhs,
)
from .verma import MixedWeight, ModuleVector, VermaModule, plan_order, standard_order
from .yangian import bethe_direct, r_entry, rtt_check, t_entry_apply, yang_baxter_check

__all__ = [
    "CHECK_NAMES",
    "BudgetExceeded",
    "CheckSpec",
    "InvalidConfig",
    "InvalidPlan",
    "MixedWeight",
    "ModuleVector",
    "PoleError",
    "Rational",
    "ResampleExhausted",
    "Shape",
    "VarAssignment",
    "VermaModule",
    "bethe_direct",
    "bethe_recursive",
    "mainth_rhs",
    "plan_order",
    "r_entry",
    "rational",
    "rtt_check",
    "run_check",
    "sample_assignment",
    "splitting_rhs",
    "standard_order",
    "symmetrize",
    "t_entry_apply",
    "uprop_rhs",
    "xi_m_zero_rhs",
    "yang_baxter_check",
]
