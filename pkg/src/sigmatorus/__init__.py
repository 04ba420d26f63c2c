"""Exact decision procedures for difference equations on algebraic tori."""

__version__ = "0.1.0"

from .classify import (ClassifyReport, DiffMatrix, SmithForm, classify, companion_matrix,
                       dynamics_charpoly, dynamics_diffmatrix, no_root_of_unity, smith_form)
from .errors import (HenselError, HypothesisViolated, InsufficientPrecision, PrecisionCapExceeded,
                     SigmaTorusError, SingularMatrixError, ZeroPolynomialError, ZeroSeriesError)
from .fields import QQ, GaloisField, RationalField
from .hahn import (ASCertificate, HahnSeries, artin_schreier_reduce, newton_iterates, newton_lift,
                   sigma_action)
from .laurent import (IntPoly, LaurentPoly, ModularityVerdict, content, cyclotomic, factor_rational,
                      is_cyclotomic, is_modular, normalize)
from .obstruction import (ObstructionReport, RamificationDatum, SigmaStabilityResult, babbitt_finite,
                          babbitt_quadratic_function_field, obstruct, theta_invariant)
from .reals import AlgebraicReal, Exponent, ExponentGroup
from .recurrence import (Budgets, Direction, RecurrenceWitness, eigenvalue_power_of_p,
                         find_recurrent_direction, near_returns, power_of_p_exponents)
from .torsion import (QuotientStructure, TorsionEndo, TorsionModule, endo_from_diffmatrix,
                      kernel_order, phi_map, quotient_structure)
