"""Finite-scale numerics for length functions, cocycles and Fourier multipliers on group algebras."""
from .algebra import (AlgebraElement, BmoReport, adjoint, bmo_norm, conditional_expectation_G0,
                      convolve, lp_norm, project_J, semigroup_apply, to_matrix, trace)
from .catalog import catalog as catalog_cocycle
from .cocycles import (Cocycle, LengthFunction, ball_count_check, build_cocycle,
                       cocycle_residuals, gromov_form, is_conditionally_negative,
                       schoenberg_check, separation_report)
from .errors import CocycleLabError
from .euclid import (GridSignal, donut_symbol, empirical_norm_sweep, fft_apply,
                     restriction_compare)
from .gradient import (DerivationElement, GaussianField, crossed_lp_montecarlo, delta,
                       gamma_generator, gamma_gram, generator_apply, khintchine_band,
                       meyer_ratio)
from .groups import (FiniteGroup, WordBall, build_cyclic, build_dihedral, build_heisenberg_mod,
                     build_named, build_symmetric, build_word_ball, direct_product,
                     validate_group)
from .kernels import BACKEND
from .littlewood_paley import (DyadicFamily, dyadic_family, reconstruction_check,
                               square_function_norms)
from .multipliers import (MihlinReport, MultiplierSymbol, apply, imaginary_power_symbol,
                          l2_norm_exact, lifted_symbol, lp_norm_search, mihlin_check,
                          radial_symbol, riesz_symbol, schur_riesz_residual)

__version__ = "0.1.0"
