"""Random walks on the smash line algebra: a real line braided with an anyonic line."""
from .algebra import BraidParams, SmashElement, coproduct_n, normal_order
from .diffusion import DiffusionParams, phi_infinity, finite_n_functional
from .errors import DomainError, InvalidDegreeError, InvalidOrderError, SmashlineError, UnsupportedError
from .moments import MomentTable, evolve_moments, moment_table
from .nonstationary import HamiltonianDrift, phi_infinity_nonstat
from .transition import TransitionOp, apply_T, compose_T, transition_op
from .walk import BernoulliDensity, Convex, Counit, Mixed, Product, convolve_moment

__version__ = "0.1.0"

__all__ = [
    "BraidParams", "SmashElement", "coproduct_n", "normal_order",
    "DiffusionParams", "phi_infinity", "finite_n_functional",
    "DomainError", "InvalidDegreeError", "InvalidOrderError", "SmashlineError", "UnsupportedError",
    "MomentTable", "evolve_moments", "moment_table",
    "HamiltonianDrift", "phi_infinity_nonstat",
    "TransitionOp", "apply_T", "compose_T", "transition_op",
    "BernoulliDensity", "Convex", "Counit", "Mixed", "Product", "convolve_moment",
]
