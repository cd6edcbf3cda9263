"""Compare exact alternating and plain sums against their predicted main terms.

Each registered arithmetic function carries a main-term model whose
constants come from the constants module.  Reports hold exact sums on a
grid, model predictions, residuals, residuals normalized by the known
error shape, and a fitted error exponent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from mpmath import mpf

from .constants import (
    ConstantsContext,
    euler_gamma,
    named_constant,
    zeta,
    zeta_derivative,
    zeta_via_eta,
)
from .convolution import (
    alternating_sums_at,
    kk_identity_check,
    kk_sign_probe,
    plain_sums_at,
    validate_qset,
)
from .errors import CapacityError, DomainError
from .functions import MultiplicativeFunction, get_function
from .sieve import SpfTable, build_spf

MODES = ("alternating", "plain")


# --- main-term shapes ---


@dataclass(frozen=True)
class Quadratic:
    C: mpf

    def value(self, x: mpf) -> mpf:
        return self.C * x * x


@dataclass(frozen=True)
class QuadraticLog:
    # C * x^2 * (log x + c0)
    C: mpf
    c0: mpf

    def value(self, x: mpf) -> mpf:
        return self.C * x * x * (mp.log(x) + self.c0)


@dataclass(frozen=True)
class LinearLog:
    # c1 * x * log x + c0 * x
    c1: mpf
    c0: mpf

    def value(self, x: mpf) -> mpf:
        return self.c1 * x * mp.log(x) + self.c0 * x


@dataclass(frozen=True)
class Linear:
    C: mpf

    def value(self, x: mpf) -> mpf:
        return self.C * x


@dataclass(frozen=True)
class LogPlusConst:
    # D * log x + E
    D: mpf
    E: mpf

    def value(self, x: mpf) -> mpf:
        return self.D * mp.log(x) + self.E


@dataclass(frozen=True)
class PowerSum:
    # sum of c_i * x^{e_i}, exponents strictly decreasing
    terms: tuple[tuple[mpf, Fraction], ...]

    def __post_init__(self) -> None:
        exps = [e for _, e in self.terms]
        if any(b >= a for a, b in zip(exps, exps[1:])):
            raise DomainError("power-sum exponents must be strictly decreasing")

    def value(self, x: mpf) -> mpf:
        return sum((c * x ** _mpf_exp(e) for c, e in self.terms), mpf(0))


@dataclass(frozen=True)
class InverseLogPowers:
    # x^{x_power} * sum of B_t * (log x)^{e_t}; only the leading term is
    # asserted anywhere, deeper coefficients are data
    terms: tuple[tuple[mpf, Fraction], ...]
    x_power: int = 1

    def value(self, x: mpf) -> mpf:
        lg = mp.log(x)
        base = x ** self.x_power if self.x_power else mpf(1)
        return base * sum((b * lg ** _mpf_exp(e) for b, e in self.terms), mpf(0))


def _mpf_exp(e: Fraction) -> mpf:
    return mpf(e.numerator) / e.denominator


Shape = Quadratic | QuadraticLog | LinearLog | Linear | LogPlusConst | PowerSum | InverseLogPowers


# --- error-term shapes, unknown positive constants set to 1 ---


@dataclass(frozen=True)
class ErrorShape:
    """x^a (log x)^b (log log x)^c, optionally damped by
    exp(-(log x)^{3/5} (log log x)^{-1/5})."""

    x_power: float
    log_power: float = 0.0
    loglog_power: float = 0.0
    damped: bool = False

    def value(self, x: mpf) -> mpf:
        lg = mp.log(x)
        out = x ** mpf(self.x_power)
        if self.log_power:
            out *= lg ** mpf(self.log_power)
        if self.loglog_power or self.damped:
            if x < 3:
                raise DomainError("log log factor needs x >= 3")
            llg = mp.log(lg)
            if self.loglog_power:
                out *= llg ** mpf(self.loglog_power)
            if self.damped:
                out *= mp.exp(-(lg ** mpf("0.6")) * llg ** mpf(-0.2))
        return out

    def label(self) -> str:
        parts = []
        if self.x_power:
            parts.append(f"x^{self.x_power:g}")
        if self.log_power:
            parts.append(f"(log x)^{self.log_power:g}")
        if self.loglog_power:
            parts.append(f"(log log x)^{self.loglog_power:g}")
        if self.damped:
            parts.append("exp(-(log x)^(3/5)(log log x)^(-1/5))")
        return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class AsymptoticModel:
    function_id: str
    mode: str
    shape: Shape
    error: ErrorShape


def predict(model: AsymptoticModel, x: int | mpf) -> mpf:
    """Main-term value of the model at x >= 2."""
    if x < 2:
        raise DomainError("prediction needs x >= 2")
    return model.shape.value(mpf(x))


# --- the model table ---

# Dirichlet divisor problem exponent, currently best known
THETA = 131.0 / 416.0

_damped32 = ErrorShape(1.5, damped=True)
_damped12 = ErrorShape(0.5, damped=True)


def _zeta_ratio_log_deriv(ctx: ConstantsContext) -> mpf:
    return zeta_derivative(mpf(2)) / zeta(mpf(2))


def _log2() -> mpf:
    return mp.log(2)


def _m_phi(ctx: ConstantsContext, alt: bool) -> Shape:
    c = 1 / mp.pi**2 if alt else 3 / mp.pi**2
    return Quadratic(c)


def _m_psi(ctx: ConstantsContext, alt: bool) -> Shape:
    c = -3 / (2 * mp.pi**2) if alt else 15 / (2 * mp.pi**2)
    return Quadratic(c)


def _m_sigma(ctx: ConstantsContext, alt: bool) -> Shape:
    c = -mp.pi**2 / 48 if alt else mp.pi**2 / 12
    return Quadratic(c)


def _m_recip_phi(ctx: ConstantsContext, alt: bool) -> Shape:
    a = named_constant("A", ctx).value
    b = named_constant("B", ctx).value
    g = euler_gamma()
    if not alt:
        return LogPlusConst(a, a * (g - b))
    d = -a / 3
    return LogPlusConst(d, d * (g - b - mpf(8) / 3 * _log2()))


def _m_recip_psi(ctx: ConstantsContext, alt: bool) -> Shape:
    c = named_constant("C", ctx).value
    d = named_constant("D", ctx).value
    g = euler_gamma()
    if not alt:
        return LogPlusConst(c, c * (g + d))
    scale = c / 5
    return LogPlusConst(scale, scale * (g + d + mpf(24) / 5 * _log2()))


def _m_recip_sigma(ctx: ConstantsContext, alt: bool) -> Shape:
    e = named_constant("E", ctx).value
    f_ = named_constant("F", ctx).value
    g = euler_gamma()
    if not alt:
        return LogPlusConst(e, e * (g + f_))
    k = named_constant("K", ctx).value
    kp = named_constant("K_prime", ctx).value
    lead = e * (2 / k - 1)
    return LogPlusConst(lead, lead * (g + f_) + e * 2 * _log2() * kp / k**2)


def _m_tau(ctx: ConstantsContext, alt: bool) -> Shape:
    g = euler_gamma()
    if alt:
        return LinearLog(mpf(-1) / 2, mpf(1) / 2 - g + _log2())
    return LinearLog(mpf(1), 2 * g - 1)


def _m_recip_tau(ctx: ConstantsContext, alt: bool) -> Shape:
    a1 = named_constant("A_1", ctx).value
    b1 = a1 * (1 / _log2() - 1)
    lead = b1 if alt else a1
    return InverseLogPowers(((lead, Fraction(-1, 2)),), x_power=1)


def _m_gcd_sum(ctx: ConstantsContext, alt: bool) -> Shape:
    g = euler_gamma()
    c0 = 2 * g - mpf(1) / 2 - _zeta_ratio_log_deriv(ctx)
    if alt:
        return QuadraticLog(-1 / mp.pi**2, c0 - mpf(10) / 3 * _log2())
    return QuadraticLog(3 / mp.pi**2, c0)


def _m_recip_gcd_sum(ctx: ConstantsContext, alt: bool) -> Shape:
    k0 = named_constant("K_0", ctx).value
    # transfer 2/S - 1 with S = 8 log 2 - 4, the unweighted local series at p=2
    lead = k0 * (1 / (2 * (2 * _log2() - 1)) - 1) if alt else k0
    return InverseLogPowers(((lead, Fraction(1, 2)),), x_power=0)


def _m_kappa(ctx: ConstantsContext, alt: bool) -> Shape:
    c = named_constant("C", ctx).value
    return Quadratic(c / 10 if alt else c / 2)


def _m_mu_sq(ctx: ConstantsContext, alt: bool) -> Shape:
    return Linear(2 / mp.pi**2 if alt else 6 / mp.pi**2)


def _m_abelian(ctx: ConstantsContext, alt: bool) -> Shape:
    terms = []
    for j, e in ((1, Fraction(1)), (2, Fraction(1, 2)), (3, Fraction(1, 3))):
        c = named_constant(f"C_{j}", ctx).value
        if alt:
            c *= named_constant(f"K_{j}", ctx).value
        terms.append((c, e))
    return PowerSum(tuple(terms))


def _m_recip_abelian(ctx: ConstantsContext, alt: bool) -> Shape:
    d = named_constant("D_abelian", ctx).value
    return Linear(d)


def _m_sigma_star(ctx: ConstantsContext, alt: bool) -> Shape:
    z3 = zeta(mpf(3))
    c = -mp.pi**2 / (84 * z3) if alt else mp.pi**2 / (12 * z3)
    return Quadratic(c)


def _m_phi_star(ctx: ConstantsContext, alt: bool) -> Shape:
    c = named_constant("C", ctx).value
    return Quadratic(c / 10 if alt else c / 2)


def _m_kappa_star(ctx: ConstantsContext, alt: bool) -> Shape:
    ct = named_constant("C_tilde", ctx).value
    return Quadratic(5 * ct / 38 if alt else ct / 2)


def _m_recip_kappa_star(ctx: ConstantsContext, alt: bool) -> Shape:
    if alt:
        a = named_constant("A_star", ctx).value
        b = named_constant("B_star", ctx).value
        a *= zeta(mpf(3) / 2) / zeta(mpf(3))
        b *= zeta_via_eta(mpf(2) / 3) / zeta(mpf(2))
    else:
        a = named_constant("c_1", ctx).value
        b = named_constant("c_2", ctx).value
    return PowerSum(((a, Fraction(1, 2)), (b, Fraction(1, 3))))


def _m_pow(ctx: ConstantsContext, alt: bool) -> Shape:
    inner = _m_recip_kappa_star(ctx, alt)
    (a, _), (b, _) = inner.terms
    # partial summation lifts x^{1/2} to x^{3/2}/3 and x^{1/3} to x^{4/3}/4
    return PowerSum(((a / 3, Fraction(3, 2)), (b / 4, Fraction(4, 3))))


def _m_recip_pow(ctx: ConstantsContext, alt: bool) -> Shape:
    ct = named_constant("C_tilde", ctx).value
    return Linear(5 * ct / 19 if alt else ct)


def _m_sigma_bi(ctx: ConstantsContext, alt: bool) -> Shape:
    c = named_constant("C_star_star", ctx).value
    return Quadratic(-11 * c / 106 if alt else c / 2)


def _m_beta(ctx: ConstantsContext, alt: bool) -> Shape:
    c = mp.pi**2 / 120 if alt else mp.pi**2 / 30
    return Quadratic(c)


@dataclass(frozen=True)
class _ModelSpec:
    build: Callable[[ConstantsContext, bool], Shape]
    error_alt: ErrorShape
    error_plain: ErrorShape


def _spec(build, error, error_plain=None) -> _ModelSpec:
    return _ModelSpec(build, error, error_plain if error_plain is not None else error)


_MODEL_SPECS: dict[str, _ModelSpec] = {
    "phi": _spec(_m_phi, ErrorShape(1, 2 / 3, 4 / 3)),
    "1/phi": _spec(_m_recip_phi, ErrorShape(-1, 5 / 3), ErrorShape(-1, 2 / 3)),
    "psi": _spec(_m_psi, ErrorShape(1, 2 / 3)),
    "1/psi": _spec(_m_recip_psi, ErrorShape(-1, 2 / 3, 4 / 3)),
    "sigma": _spec(_m_sigma, ErrorShape(1, 2 / 3)),
    "1/sigma": _spec(_m_recip_sigma, ErrorShape(-1, 5 / 3, 4 / 3), ErrorShape(-1, 2 / 3, 4 / 3)),
    "tau": _spec(_m_tau, ErrorShape(THETA)),
    "1/tau": _spec(_m_recip_tau, ErrorShape(1, -1.5)),
    "gcd_sum": _spec(_m_gcd_sum, ErrorShape(1 + THETA)),
    "1/gcd_sum": _spec(_m_recip_gcd_sum, ErrorShape(0, -0.5)),
    "kappa": _spec(_m_kappa, _damped32),
    "mu_sq": _spec(_m_mu_sq, _damped12),
    "abelian": _spec(_m_abelian, ErrorShape(0.25)),
    "1/abelian": _spec(_m_recip_abelian, ErrorShape(0.5, -0.5)),
    "sigma_star": _spec(_m_sigma_star, ErrorShape(1, 5 / 3)),
    "phi_star": _spec(_m_phi_star, ErrorShape(1, 5 / 3, 4 / 3)),
    "kappa_star": _spec(_m_kappa_star, _damped32),
    "1/kappa_star": _spec(_m_recip_kappa_star, ErrorShape(0.2)),
    "pow": _spec(_m_pow, ErrorShape(1.2)),
    "1/pow": _spec(_m_recip_pow, _damped12),
    "sigma_bi": _spec(_m_sigma_bi, ErrorShape(1, 3)),
    "beta": _spec(_m_beta, ErrorShape(1, 2 / 3, 4 / 3)),
}

# the mean of (-1)^(n-1)/a(n) exists but no error shape is known for it
_ALTERNATING_ONLY_EXCLUDED = ("1/abelian",)


def model_ids(mode: str = "alternating") -> list[str]:
    """Function ids with a registered main-term model for the given mode."""
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    ids = list(_MODEL_SPECS)
    if mode == "alternating":
        ids = [i for i in ids if i not in _ALTERNATING_ONLY_EXCLUDED]
    return ids


def build_model(
    function_id: str, mode: str = "alternating", ctx: ConstantsContext | None = None
) -> AsymptoticModel:
    """Instantiate the main-term model for a function id, resolving its
    constants at the context's prime limit."""
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    spec = _MODEL_SPECS.get(function_id)
    if spec is None or (mode == "alternating" and function_id in _ALTERNATING_ONLY_EXCLUDED):
        known = ", ".join(model_ids(mode))
        raise DomainError(f"no {mode} model for {function_id!r}; known: {known}")
    if ctx is None:
        ctx = ConstantsContext()
    alt = mode == "alternating"
    with ctx.workprec():
        shape = spec.build(ctx, alt)
    return AsymptoticModel(function_id, mode, shape, spec.error_alt if alt else spec.error_plain)


def sigma_q_model(q: Sequence[int], ctx: ConstantsContext | None = None) -> AsymptoticModel:
    """Main term of the Q-signed divisor sum: (pi^2/12) (2 prod_{p in Q}
    (1-1/p)(1-1/p^2) - 1) x^2."""
    qset = validate_qset(q)
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        prod = mpf(1)
        for p in qset:
            prod *= (1 - mpf(1) / p) * (1 - mpf(1) / p**2)
        shape = Quadratic(mp.pi**2 / 12 * (2 * prod - 1))
    mode = "q=" + ",".join(str(p) for p in qset)
    return AsymptoticModel("sigma", mode, shape, ErrorShape(1, 2 / 3))


# --- reports ---


@dataclass(frozen=True)
class SumReport:
    function_id: str
    mode: str
    grid: tuple[int, ...]
    exact: tuple[int | Fraction, ...]
    predicted: tuple[mpf, ...]
    residual: tuple[mpf, ...]
    normalized: tuple[mpf, ...]
    fitted_exponent: float | None

    def ratios(self) -> list[mpf]:
        """exact / predicted per grid point."""
        return [_exact_to_mpf(e) / p for e, p in zip(self.exact, self.predicted)]


def default_grid(slow: bool = False) -> list[int]:
    # geometric spacing keeps the exponent fit well conditioned
    top = 24 if slow else 21
    return [2**k for k in range(10, top)]


def _normalize_exact(v) -> int | Fraction:
    # sieve sums arrive as int or gmpy2 rational
    if isinstance(v, (int, Fraction)):
        return v
    if v.denominator == 1:
        return int(v)
    return Fraction(int(v.numerator), int(v.denominator))


def _exact_to_mpf(v: int | Fraction) -> mpf:
    if isinstance(v, int):
        return mpf(v)
    return mpf(v.numerator) / v.denominator


def fit_error_exponent(
    grid: Sequence[int], residuals: Sequence[mpf]
) -> float | None:
    """Least-squares slope of log|residual| against log x.  Zero residuals
    are excluded; with fewer than 4 usable points the fit is undefined and
    None is returned."""
    xs = []
    ys = []
    for x, r in zip(grid, residuals):
        if r == 0:
            continue
        xs.append(float(mp.log(x)))
        ys.append(float(mp.log(abs(r))))
    if len(xs) < 4:
        return None
    a = np.vstack([xs, np.ones(len(xs))]).T
    slope, _ = np.linalg.lstsq(a, np.array(ys), rcond=None)[0]
    return float(slope)


def run_report(
    f: MultiplicativeFunction | str,
    mode: str = "alternating",
    grid: Sequence[int] | None = None,
    table: SpfTable | None = None,
    ctx: ConstantsContext | None = None,
    sums: dict | None = None,
) -> SumReport:
    """Exact sums of f on the grid against its main-term model.

    `sums` may carry precomputed exact sums (x -> value, as produced by
    alternating_sums_at / plain_sums_at); workers can then do the heavy
    exact arithmetic concurrently while the mpmath phase stays in one
    thread, since mpmath precision is process-global state.

    Emits a RuntimeWarning when the fitted error exponent overshoots the
    theorem's exponent by more than 0.2; that margin is a heuristic for
    flagging drift, not a proof of failure.
    """
    if isinstance(f, str):
        f = get_function(f)
    if grid is None:
        grid = default_grid()
    grid = [int(x) for x in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly ascending")
    if grid[0] < 3:
        raise DomainError("grid starts below 3; error shapes need x >= 3")
    if ctx is None:
        ctx = ConstantsContext()
    model = build_model(f.id, mode, ctx)
    if sums is None:
        if table is None:
            table = build_spf(grid[-1])
        elif table.limit < grid[-1]:
            raise CapacityError(f"sieve covers {table.limit} < {grid[-1]}")
        sums = (
            alternating_sums_at(f, grid, table)
            if mode == "alternating"
            else plain_sums_at(f, grid, table)
        )
    elif any(x not in sums for x in grid):
        raise DomainError("precomputed sums do not cover the grid")
    exact = tuple(_normalize_exact(sums[x]) for x in grid)
    with ctx.workprec():
        predicted = tuple(predict(model, x) for x in grid)
        residual = tuple(_exact_to_mpf(e) - p for e, p in zip(exact, predicted))
        normalized = tuple(r / model.error.value(mpf(x)) for r, x in zip(residual, grid))
    fitted = fit_error_exponent(grid, residual)
    if fitted is not None and fitted > model.error.x_power + 0.2:
        warnings.warn(
            f"{f.id} {mode}: fitted error exponent {fitted:.3f} exceeds "
            f"{model.error.x_power:.3f} + 0.2 on grid up to {grid[-1]}",
            RuntimeWarning,
            stacklevel=2,
        )
    return SumReport(f.id, mode, tuple(grid), exact, predicted, residual, normalized, fitted)
