"""Finite-field point counting and non-singular zeros of hypersurfaces."""

from .bounds import (cafure_matera_rhs, leep_yeomans_lower, schmidt_constant, schmidt_rhs,
                     threshold_report, thm2_satisfied, thm2_threshold, thm3_satisfied,
                     thm3_threshold)
from .enumeration import (CountReport, Witness, count_all, count_common_zeros,
                          count_nonsingular_curve, count_singular, count_zeros, find_nonsingular)
from .errors import (BudgetExceededError, FieldError, FieldMismatchError, InvariantViolation,
                     NonsingularError, PolySyntaxError, PreconditionError, SlicesExhaustedError)
from .field import FieldElement, FieldSpec, arith, embed, field_of_order, make_field, parse_field
from .harness import RandomFormSpec, VerificationRun, gen_random_form
from .irreducible import is_absolutely_irreducible, is_irreducible_over
from .poly import (MPoly, compose, dehomogenize, divides, evaluate, gradient, homogenize,
                   parse_poly, poly_divmod)
from .slicing import SliceVector, find_nonsingular_via_slicing, lift_point, slice_poly

__version__ = "0.1.0"
