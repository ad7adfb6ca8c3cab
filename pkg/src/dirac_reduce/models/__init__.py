"""Exactly solvable catalogs: Poschl-Teller, crossed combs, soliton, tanh-mass scenario."""
from .crossed_comb import (CrossedCombParams, CrossedCombSystem, crossed_comb_bispinors,
                           crossed_comb_energy, crossed_comb_mode, crossed_comb_potential,
                           crossed_comb_printed, crossed_comb_printed_components,
                           crossed_comb_reducible)
from .poschl_teller import (Admissibility, PoschlTellerParams, jacobi_exponents, pt_admissible,
                            pt_band_structure, pt_disorder_pair, pt_disorder_potential, pt_energy,
                            pt_mode, pt_operator, pt_potential, pt_printed_components, sigma_rho)
from .soliton import (SolitonParams, soliton_bispinors, soliton_d2, soliton_fields,
                      soliton_mu_lambda, soliton_pair, soliton_potential,
                      soliton_printed_bispinors, soliton_printed_mu_lambda)
from .special import jacobi_derivative, jacobi_polynomial
from .spin_orbit import (Scenario2, SpinOrbitFields, scenario2_model, scenario2_printed_fields,
                         spin_orbit_assemble, spin_orbit_fields, spin_orbit_layout, spin_orbit_pair,
                         spin_orbit_params)
