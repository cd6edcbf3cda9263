"""Power-series coefficients attached to a function at the prime 2.

For a multiplicative f, the local series at 2 is S(x) = sum_nu f(2**nu) x**nu
with S(0) = 1.  Its formal reciprocal 1/S = sum_nu b_nu x**nu drives the whole
alternating-sum machinery: the convolution kernel in `convolution` is built
from the b_nu, and evaluations of S at 2**(-s) turn main-term constants of
ordinary sums into their alternating counterparts.

All coefficients are exact Fractions.  Series are short (a few hundred terms
at most), so no cleverness is needed here beyond the triangular recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapacityError, DomainError
from .functions import MultiplicativeFunction

SERIES_CAP = 256
MULTINOMIAL_CAP = 16


@dataclass
class CoefficientSeries:
    """Exact coefficients c_0..c_N of a local power series.

    origin records how the series arose: "local" for S itself, "reciprocal"
    for 1/S, "kernel" for the convolution-kernel values.
    """

    function_id: str
    origin: str
    coeffs: list[Fraction] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]


def bell_coeffs(f: MultiplicativeFunction, n: int) -> CoefficientSeries:
    """Local series coefficients a_nu = f(2**nu) for nu = 0..n, exact."""
    if n > SERIES_CAP:
        raise CapacityError(f"series order {n} exceeds cap {SERIES_CAP}")
    if n < 0:
        raise DomainError("order must be nonnegative")
    coeffs = [Fraction(1)]
    for nu in range(1, n + 1):
        coeffs.append(Fraction(f.rule(2, nu)))
    return CoefficientSeries(function_id=f.id, origin="local", coeffs=coeffs)


def reciprocal_coeffs(a: CoefficientSeries) -> CoefficientSeries:
    """Coefficients of 1/S by the triangular recurrence.

    Requires a_0 = 1 (all local series here are normalized); then b_0 = 1 and
    b_nu = -sum_{j=1..nu} a_j b_{nu-j}.
    """
    if not a.coeffs or a.coeffs[0] != 1:
        raise DomainError("reciprocal needs constant term 1")
    n = len(a.coeffs) - 1
    b = [Fraction(1)]
    for nu in range(1, n + 1):
        acc = Fraction(0)
        for j in range(1, nu + 1):
            acc += a.coeffs[j] * b[nu - j]
        b.append(-acc)
    return CoefficientSeries(function_id=a.function_id, origin="reciprocal", coeffs=b)


def reciprocal_coeffs_multinomial(a: CoefficientSeries, n: int) -> CoefficientSeries:
    """Reciprocal coefficients by explicit composition sums (independent route).

    b_nu = sum_{k=1..nu} (-1)**k  sum_{j_1+...+j_k = nu, j_i >= 1}
           a_{j_1} * ... * a_{j_k}.
    Exponential in nu, so capped at nu <= 16; exists to cross-check the
    recurrence, not to be fast.
    """
    if n > MULTINOMIAL_CAP:
        raise CapacityError(f"composition route capped at order {MULTINOMIAL_CAP}")
    if not a.coeffs or a.coeffs[0] != 1:
        raise DomainError("reciprocal needs constant term 1")
    b = [Fraction(1)]
    for nu in range(1, n + 1):
        total = Fraction(0)

        def walk(remaining: int, parts: int, prod: Fraction):
            nonlocal total
            if remaining == 0:
                total += (-1) ** parts * prod
                return
            for j in range(1, remaining + 1):
                walk(remaining - j, parts + 1, prod * a.coeffs[j])

        walk(nu, 0, Fraction(1))
        b.append(total)
    return CoefficientSeries(function_id=a.function_id, origin="reciprocal", coeffs=b)


def convolve(a: CoefficientSeries, b: CoefficientSeries, n: int) -> list[Fraction]:
    """Coefficients 0..n of the product series a*b."""
    out = []
    for nu in range(n + 1):
        acc = Fraction(0)
        for j in range(nu + 1):
            if j < len(a.coeffs) and nu - j < len(b.coeffs):
                acc += a.coeffs[j] * b.coeffs[nu - j]
        out.append(acc)
    return out


@dataclass
class KaluzaReport:
    """Outcome of the log-convexity criterion on a positive local series."""

    log_convex: bool
    first_violation: int | None  # smallest nu where a_nu**2 > a_{nu-1} a_{nu+1}
    bounds_hold: bool | None  # -a_nu/a_0**2 <= b_nu <= 0 for nu >= 1; None if not log-convex
    reciprocal: CoefficientSeries


def check_kaluza(a: CoefficientSeries) -> KaluzaReport:
    """Test log-convexity of a positive series and the implied sign/size
    bounds on its reciprocal: for log-convex a, every b_nu (nu >= 1) lies in
    [-a_nu / a_0**2, 0].

    Coefficients must all be positive (DomainError otherwise).  When the
    hypothesis holds the bounds are a theorem; a violation in that case is an
    internal error, not a report entry.
    """
    coeffs = a.coeffs
    for nu, c in enumerate(coeffs):
        if c <= 0:
            raise DomainError(f"coefficient {nu} of {a.function_id} is not positive")
    first_violation = None
    for nu in range(1, len(coeffs) - 1):
        if coeffs[nu] * coeffs[nu] > coeffs[nu - 1] * coeffs[nu + 1]:
            first_violation = nu
            break
    log_convex = first_violation is None
    b = reciprocal_coeffs(a)
    bounds_hold = None
    if log_convex:
        a0sq = coeffs[0] * coeffs[0]
        bounds_hold = all(
            -coeffs[nu] / a0sq <= b.coeffs[nu] <= 0 for nu in range(1, len(b.coeffs))
        )
        if not bounds_hold:
            raise AssertionError(
                f"log-convex series {a.function_id} violates reciprocal bounds"
            )
    return KaluzaReport(
        log_convex=log_convex,
        first_violation=first_violation,
        bounds_hold=bounds_hold,
        reciprocal=b,
    )


@dataclass
class GeometricBoundReport:
    """Outcome of the explicit geometric bound on reciprocal coefficients."""

    hypothesis_holds: bool
    first_hypothesis_violation: int | None
    bound_holds: bool | None
    margins: list[Fraction]  # A q^nu (A+1)^(nu-1) - |b_nu|, nu >= 1


def geometric_reciprocal_bound(
    a: CoefficientSeries, bound_a: Fraction, ratio_q: Fraction
) -> GeometricBoundReport:
    """Check |a_nu| <= A q**nu (nu >= 1, a_0 = 1) and the implied bound
    |b_nu| <= A q**nu (A+1)**(nu-1) on the reciprocal, all in exact rationals.

    As with `check_kaluza`, the conclusion is a theorem once the hypothesis
    holds; failing it then raises instead of reporting.
    """
    if a.coeffs[0] != 1:
        raise DomainError("geometric bound stated for a_0 = 1")
    A = Fraction(bound_a)
    q = Fraction(ratio_q)
    first = None
    for nu in range(1, len(a.coeffs)):
        if abs(a.coeffs[nu]) > A * q**nu:
            first = nu
            break
    hypothesis = first is None
    b = reciprocal_coeffs(a)
    margins: list[Fraction] = []
    bound_holds = None
    if hypothesis:
        bound_holds = True
        for nu in range(1, len(b.coeffs)):
            cap = A * q**nu * (A + 1) ** (nu - 1)
            margins.append(cap - abs(b.coeffs[nu]))
            if margins[-1] < 0:
                bound_holds = False
        if not bound_holds:
            raise AssertionError(
                f"series {a.function_id} satisfies the hypothesis but breaks the bound"
            )
    return GeometricBoundReport(
        hypothesis_holds=hypothesis,
        first_hypothesis_violation=first,
        bound_holds=bound_holds,
        margins=margins,
    )


# --- closed forms for reciprocal coefficients, where one is known ---


def _closed_phi(nu):
    return Fraction(-1)


def _closed_psi(nu):
    return Fraction(3 * (-1) ** nu)


def _closed_sigma(nu):
    return Fraction([1, -3, 2][nu]) if nu <= 2 else Fraction(0)


def _closed_recip_phi(nu):
    # reciprocal series of 1/phi: b_nu = (-1)**nu 2**(1-nu)
    return Fraction((-1) ** nu * 2, 2**nu)


def _closed_recip_psi(nu):
    return Fraction(-2, 6**nu)


def _closed_recip_kappa(nu):
    return Fraction(-1, 2**nu)


def _closed_recip_kappa_star(n: int) -> list[Fraction]:
    # generating identity (x**2 - x + 2) * S_bar = 2(1 - x) yields
    # b_0 = 1, b_1 = -1/2, and 2 b_nu = b_{nu-1} - b_{nu-2} afterwards
    b = [Fraction(1), Fraction(-1, 2)]
    while len(b) <= n:
        b.append((b[-1] - b[-2]) / 2)
    return b[: n + 1]


CLOSED_FORMS = {
    ("phi", False): _closed_phi,
    ("psi", False): _closed_psi,
    ("sigma", False): _closed_sigma,
    ("phi", True): _closed_recip_phi,
    ("psi", True): _closed_recip_psi,
    ("kappa", True): _closed_recip_kappa,
    ("kappa_star", True): None,  # handled by recurrence + modulus bound
}


@dataclass
class ClosedFormReport:
    function_id: str
    reciprocal: bool
    computed: list[Fraction]
    expected: list[Fraction]
    equal: bool
    modulus_bound_ok: bool | None = None  # only for 1/kappa_star


def closed_form_check(f: MultiplicativeFunction, n: int = 64) -> ClosedFormReport:
    """Compare recurrence-computed reciprocal coefficients of f's local series
    against the known closed form, exactly, through order n.

    Pass the function whose local series is meant: closed_form_check of
    get_function("1/psi") checks the reciprocal coefficients of S_{1/psi}.
    Ids without a stated closed form raise DomainError.  For 1/kappa_star the
    closed form is the three-term recurrence above, checked exactly, plus the
    modulus bound |b_nu| <= (4/sqrt(7)) 2**(-nu/2) checked in floating point.
    """
    base_id = f.id[2:] if f.reciprocal else f.id
    key = (base_id, f.reciprocal)
    if key not in CLOSED_FORMS:
        raise DomainError(f"no closed form recorded for {f.id}")
    a = bell_coeffs(f, n)
    b = reciprocal_coeffs(a)
    modulus_ok = None
    if key == ("kappa_star", True):
        expected = _closed_recip_kappa_star(n)
        cap = 4 / math.sqrt(7)
        modulus_ok = all(
            abs(float(b.coeffs[nu])) <= cap * 2 ** (-nu / 2) * (1 + 1e-12)
            for nu in range(len(b.coeffs))
        )
    else:
        form = CLOSED_FORMS[key]
        expected = [Fraction(1)] + [form(nu) for nu in range(1, n + 1)]
    return ClosedFormReport(
        function_id=f.id,
        reciprocal=f.reciprocal,
        computed=b.coeffs,
        expected=expected,
        equal=b.coeffs == expected,
        modulus_bound_ok=modulus_ok,
    )
