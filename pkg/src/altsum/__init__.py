"""Alternating sums of multiplicative arithmetic functions.

Exact evaluation and sieving, local series and their reciprocals, the
2-adic convolution kernel identity, alternating Dirichlet series,
Euler-product constants, and desk-scale verification of main terms.
"""

from .asymptotics import build_model, model_ids, predict, run_report, sigma_q_model
from .constants import ConstantsContext, named_constant, zeta
from .convolution import (
    alternating_sum_direct,
    alternating_sum_via_kernel,
    kernel_of,
    tq_sum,
    verify_convolution,
)
from .errors import CapacityError, DomainError, VerificationError
from .functions import evaluate, function_ids, get_function, sieve_values
from .series import bell_coeffs, check_kaluza, closed_form_check, reciprocal_coeffs
from .sieve import build_spf

__version__ = "0.1.0"
