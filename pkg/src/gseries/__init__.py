"""Generalized power series with natural support and saddle transition maps."""

from .monoid import (AmbiguityError, BasisMismatch, DomainError, GeneratorBasis,
                     MonoidExponent, Ordering, SeriesError, exp_add, exp_compare,
                     exp_sub, format_exponent, parse_exponent, rational_basis,
                     sqrt_basis)
from .quadratic import QuadIrrational, qsqrt
from .series import (INF, ElementaryBox, ElementarySet, GeneralizedSeries, box_normalize,
                     gs_gamma_representation, gs_linear, gs_mul, gs_partial_x,
                     gs_partial_y, gs_reassemble, gs_truncate_gamma, gs_truncate_set)
from .series import gs_mul_sharp
from .textio import format_series, parse_number, parse_series
from .transform import (blowup_regular, blowup_singular, gs_comp_inverse, gs_compose,
                        gs_reciprocal, gs_subst_puiseux, gs_translate_y, gs_unit_power)
from .weierstrass import (NotRegular, NotSymmetric, RegularityReport, SingularJacobian,
                          elementary_substitutes, implicit_solve, implicit_solve_lagrange,
                          implicit_solve_system, regular_order, symmetric_reduce, w_divide,
                          w_prepare)

__version__ = "0.1.0"
