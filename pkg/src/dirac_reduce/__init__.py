"""Reduction of coupled 4x4 Dirac equations to pairs of 2x2 problems."""
from .algebra import (Potential2x2, Potential4x4, ReductionParams, ScalarField, blockdiag,
                      mixer_matrix, swap_matrix, total_transform, unitarity_defect)
from .errors import (DegenerateAngleError, DetectionError, DiracReduceError, DimensionError,
                     NotAdmissible, NotReducible, NumericError, ParameterError, SchemeMismatch,
                     UnderdeterminedAngle, ZeroEnergyMode)
from .reduction import (DisorderComponents, FixedFormComponents, PerturbationBlock, ReducedPair,
                        assemble, conjugation_oracle, detect, detect_samples, disorder_identify,
                        expectation, fixed_form_potential, lift, perturbation_lift,
                        reduced_pair_from_fixed_form)

__version__ = "0.1.0"
