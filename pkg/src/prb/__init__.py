"""Certified bounds for P-recursive sequences and tails of D-finite series."""

from .arith import GaussianRational, Poly, RatFun
from .errors import (DomainError, InternalError, ParseError, PrbError, PrecisionError,
                     PreconditionError)
from .growth import asympt, normalized_diffeq, rec_to_diffeq
from .modulus import Cmp, compare_moduli, dominant_modulus
from .operators import DiffOperatorTheta, RecOperator, newton_polygon, symmetric_product, unroll
from .ratmajorant import bound_ratpoly
from .dmajorant import MajorantSeries, bound_normal_diffeq, majorant_coefficient
from .seqbounds import (BoundParams, bound_rec, evaluate_bound, saddle_point_bound,
                        saddle_point_coefficient_bound, symbolic_bound)
from .tails import TailQuery, tail_bound, truncation_order
from .oracle import check_certificate, minimal_truncation_order
from .parse import parse_problem

__version__ = "0.1.0"
