from .convergence import ConvergenceResult, convergence_order, observed_order
from .discretize import DiscreteOperator, GapStates, discretize_1d, eigen_in_gap, participation_ratio
from .grid import Grid1D, Grid2D, GridTX
from .quadrature import quadrature
from .residual import (central_difference, kinetic_terms, operator_residual, residual_spacetime,
                       residual_stationary)
from .spinor import SampledBispinor, SampledSpinor

__all__ = [
    "ConvergenceResult", "DiscreteOperator", "GapStates", "Grid1D", "Grid2D", "GridTX",
    "SampledBispinor", "SampledSpinor", "central_difference", "convergence_order",
    "discretize_1d", "eigen_in_gap", "kinetic_terms", "observed_order", "operator_residual",
    "participation_ratio", "quadrature", "residual_spacetime", "residual_stationary",
]
