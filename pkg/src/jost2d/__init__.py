"""Jost functions of a 2D circularly symmetric potential.

The radial problem is solved by variable-phase ODEs along rotated rays.
The Jost functions are split into single-valued parts (a~, b~) and the
logarithmic factor h(k), which gives spectral points on any sheet,
power-series expansions about any energy, effective-range parameters
and real-energy observables.
"""
from .contour import (Contour, RadialSolution, build_contour, integrate_ab,
                      integrate_finout, integrate_tilde, zero_im_kr_angle)
from .errors import (ConfigError, ContourInadequateError, DomainError, DomainWarning,
                     IllConditionedFitError, InvalidRotationError, JostError,
                     NoExponentialDecayError, NoLowEnergyScatteringWarning,
                     NonConvergenceError, PoleWarning, SingularArgumentError,
                     UnsupportedEvaluationError, ZeroDenominatorError, ZeroEnergyPoleError)
from .expansion import (EffectiveRangeParams, ExpansionSet, FitDiagnostics, approx_jost,
                        approx_jost_many, approx_root, effective_range_function,
                        effective_range_params, fit_coefficients, integrate_expansion)
from .jost import (JostPair, RiemannPoint, assemble_jost, in_domain_D, jost_direct,
                   jost_factorized, s_matrix)
from .potential import (DONOR_UNITS, BarrierWellPotential, CallablePotential,
                        RadialPotential, TabulatedPotential, UnitSystem, ZeroPotential,
                        c2mu_from_units, decay_constant, potential_from_config,
                        reduced_potential)
from .riccati import (PHYSICAL, RESONANT, LogBranch, PartialWave, log_branch_h, momentum,
                      riccati_derivatives, riccati_hankel, riccati_jy, taylor_c_coeffs,
                      taylor_s_coeffs, tilde_jy)
from .spectrum import (CrossSections, LevinsonReport, PhaseShiftCurve, SpectralPoint,
                       SpectrumScan, amplitudes_and_cross_sections, find_spectral_points,
                       jost_many, levinson_check, partial_cross_section, phase_shift,
                       phase_shift_curve)

__version__ = "0.1.0"
