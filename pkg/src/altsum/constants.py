"""Zeta values, Euler products over primes, and mean values.

Everything here returns mpmath mpf values computed at the precision carried by
a ConstantsContext (bits of mantissa, default 128).  Euler products and prime
sums are truncated at ctx.prime_limit; the discarded tail is estimated by
fitting the decay of the last two decades of primes geometrically, and the
estimate is reported next to the value.  Tail estimates are heuristic, not
rigorous bounds.

zeta(s) for real s > 1 is evaluated by Euler-Maclaurin summation in-repo (the
test suite compares it against an independent implementation).  Arguments in
(0, 1), needed by some constants below, go through the alternating zeta
function eta(s) = (1 - 2**(1-s)) zeta(s), whose series converges for s > 0 and
is accelerated by the Cohen-Villegas-Zagier scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from mpmath import mp, mpf

from .errors import DomainError
from .functions import MultiplicativeFunction, partition_count
from .sieve import SpfTable, build_spf, primes_up_to

DEFAULT_PRIME_LIMIT = 10**6
DEFAULT_PRECISION_BITS = 128
MIN_PRECISION_BITS = 64
_GUARD_BITS = 16
_MAX_SERIES_TERMS = 512
# decade-ratio above this reads as divergence, not slow convergence
_DIVERGENCE_RATIO = 0.95
_TAIL_SAFETY = 3


def _mpf_of(v) -> mpf:
    """mpf from int / Fraction / gmpy2.mpq without lossy float round-trips."""
    if isinstance(v, int):
        return mpf(v)
    return mpf(v.numerator) / mpf(v.denominator)


@dataclass
class ConstantsContext:
    prime_limit: int = DEFAULT_PRIME_LIMIT
    precision_bits: int = DEFAULT_PRECISION_BITS
    _primes: list[int] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.precision_bits < MIN_PRECISION_BITS:
            raise DomainError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, got {self.precision_bits}"
            )
        if self.prime_limit < 100:
            raise DomainError("prime_limit below 100 leaves nothing to fit a tail on")

    def primes(self) -> list[int]:
        if self._primes is None:
            self._primes = primes_up_to(self.prime_limit).tolist()
        return self._primes

    def workprec(self):
        return mp.workprec(self.precision_bits + _GUARD_BITS)


@dataclass(frozen=True)
class ConstantResult:
    value: mpf
    tail_estimate: mpf
    prime_limit_used: int  # 0 when no prime enumeration was involved

    def formatted(self) -> str:
        """Value printed only to the digits the tail estimate justifies."""
        v, t = self.value, self.tail_estimate
        if t <= 0:
            return mp.nstr(v, 30)
        if v == 0:
            return f"0 ±{mp.nstr(t, 3)}"
        if t >= abs(v):
            return f"{mp.nstr(v, 2)} ±{mp.nstr(t, 3)}"
        digits = int(mp.floor(mp.log10(abs(v) / t)))
        return f"{mp.nstr(v, max(1, min(30, digits)))} ±{mp.nstr(t, 3)}"


def _rounding_result(value: mpf, prime_limit_used: int = 0) -> ConstantResult:
    tail = (abs(value) + mpf(1)) * mpf(2) ** (-(mp.prec - 8))
    return ConstantResult(value=value, tail_estimate=tail, prime_limit_used=prime_limit_used)


# --- zeta machinery ---


def zeta(s) -> mpf:
    """Riemann zeta for real s > 1, by Euler-Maclaurin summation."""
    s = mpf(s)
    if not s > 1:
        raise DomainError(f"zeta requires s > 1, got {s}; use zeta_via_eta for s in (0,1)")
    return _zeta_em(s)


def _zeta_em(s: mpf) -> mpf:
    N = max(20, int(mp.prec * 0.4))
    M = max(12, int(mp.prec * 0.4))
    head = mp.fsum(mpf(n) ** (-s) for n in range(1, N))
    total = head + mpf(N) ** (1 - s) / (s - 1) + mpf(N) ** (-s) / 2
    # correction terms B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(1-s-2k)
    poch = s
    npow = mpf(N) ** (-s - 1)
    nsq = mpf(N) ** (-2)
    for k in range(1, M + 1):
        total += mp.bernoulli(2 * k) / mp.factorial(2 * k) * poch * npow
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        npow *= nsq
    return total


def zeta_via_eta(s) -> mpf:
    """Zeta continued left of 1 through the alternating series:
    zeta(s) = eta(s) / (1 - 2**(1-s)), valid for real s > 0, s != 1."""
    s = mpf(s)
    if not s > 0 or s == 1:
        raise DomainError(f"eta continuation needs s > 0, s != 1, got {s}")
    return eta(s) / (1 - mpf(2) ** (1 - s))


def eta(s) -> mpf:
    """Alternating zeta sum_{n>=1} (-1)^(n-1) n^(-s) for s > 0, via
    Cohen-Villegas-Zagier acceleration (error ~ 5.83^-n)."""
    s = mpf(s)
    if not s > 0:
        raise DomainError(f"eta requires s > 0, got {s}")
    n = int(mp.prec / 2.54) + 12
    d = (3 + 2 * mp.sqrt(2)) ** n
    d = (d + 1 / d) / 2
    b = mpf(-1)
    c = -d
    total = mpf(0)
    for k in range(n):
        c = b - c
        total += c * mpf(k + 1) ** (-s)
        b *= mpf((k + n) * (k - n)) / ((k + mpf(1) / 2) * (k + 1))
    return total / d


def zeta_derivative(s) -> mpf:
    """zeta'(s) for real s > 1 by central difference at doubled precision."""
    s = mpf(s)
    if not s > 1:
        raise DomainError(f"zeta_derivative requires s > 1, got {s}")
    with mp.workprec(mp.prec * 2 + 16):
        h = mpf(2) ** (-(mp.prec // 3))
        if s - h <= 1:
            h = (s - 1) / 4
        deriv = (_zeta_em(s + h) - _zeta_em(s - h)) / (2 * h)
    return +deriv


def euler_gamma() -> mpf:
    return +mp.euler


# --- prime sums and products ---


def _decade_windows(ctx: ConstantsContext):
    lo = ctx.prime_limit // 100
    mid = ctx.prime_limit // 10
    return lo, mid


def _tail_from_decades(d_prev: mpf, d_last: mpf, what: str) -> mpf:
    if d_last == 0:
        return mpf(0)
    if d_prev <= 0:
        return d_last * _TAIL_SAFETY
    r = d_last / d_prev
    if r >= _DIVERGENCE_RATIO:
        raise DomainError(f"{what} does not appear to converge: decade ratio {float(r):.3f}")
    return d_last * r / (1 - r) * _TAIL_SAFETY


def prime_sum(term: Callable[[int], mpf], ctx: ConstantsContext) -> ConstantResult:
    """sum over primes p <= ctx.prime_limit of term(p), with geometric tail
    estimate fitted on the last two decades.  Raises DomainError when the
    decade contributions fail to decay."""
    with ctx.workprec():
        lo, mid = _decade_windows(ctx)
        parts = []
        d_prev = mpf(0)
        d_last = mpf(0)
        for p in ctx.primes():
            t = term(p)
            parts.append(t)
            if p > mid:
                d_last += abs(t)
            elif p > lo:
                d_prev += abs(t)
        tail = _tail_from_decades(d_prev, d_last, "prime sum")
        value = mp.fsum(parts)
    return ConstantResult(value=value, tail_estimate=tail, prime_limit_used=ctx.prime_limit)


def prime_product(local_factor: Callable[[int], mpf], ctx: ConstantsContext) -> ConstantResult:
    """prod over primes p <= ctx.prime_limit of local_factor(p), computed as
    exp of a log-sum.  Factors must be positive and approach 1 fast enough for
    the decade contributions of |log factor| to decay; otherwise DomainError."""
    with ctx.workprec():
        lo, mid = _decade_windows(ctx)
        logs = []
        d_prev = mpf(0)
        d_last = mpf(0)
        for p in ctx.primes():
            fac = local_factor(p)
            if not fac > 0:
                raise DomainError(f"local factor at p={p} is {fac}, product undefined")
            lg = mp.log(fac)
            logs.append(lg)
            if p > mid:
                d_last += abs(lg)
            elif p > lo:
                d_prev += abs(lg)
        tail_log = _tail_from_decades(d_prev, d_last, "Euler product")
        value = mp.exp(mp.fsum(logs))
        tail = abs(value) * (mp.exp(tail_log) - 1)
    return ConstantResult(value=value, tail_estimate=tail, prime_limit_used=ctx.prime_limit)


def _geometric_series(term: Callable[[int], mpf], start: int = 1, what: str = "series") -> mpf:
    """Sum term(k) for k >= start until three consecutive terms fall under the
    working epsilon.  DomainError when the cap is hit first."""
    eps = mpf(2) ** (-(mp.prec + 8))
    total = mpf(0)
    small = 0
    for k in range(start, start + _MAX_SERIES_TERMS):
        t = term(k)
        total += t
        if abs(t) <= eps * (1 + abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise DomainError(f"{what} did not converge within {_MAX_SERIES_TERMS} terms")


# --- local (Bell) series, numerically ---


def bell_series_value(f: MultiplicativeFunction, x0) -> mpf:
    """S(x0) = sum_nu f(2**nu) x0**nu, summed until terms vanish numerically.
    DomainError when the series shows no decay (x0 on or past the radius)."""
    x0 = mpf(x0)
    eps = mpf(2) ** (-(mp.prec + 8))
    total = mpf(0)
    power = mpf(1)
    small = 0
    for nu in range(_MAX_SERIES_TERMS):
        t = _mpf_of(f(2, nu)) * power
        total += t
        power *= x0
        if abs(t) <= eps * (1 + abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise DomainError(f"local series of {f.id} does not converge at x0={x0}")


def bell_series_derivative(f: MultiplicativeFunction, x0) -> mpf:
    """S'(x0) = sum_nu nu f(2**nu) x0**(nu-1), same convergence handling."""
    x0 = mpf(x0)
    eps = mpf(2) ** (-(mp.prec + 8))
    total = mpf(0)
    power = mpf(1)  # x0**(nu-1) starting at nu=1
    small = 0
    for nu in range(1, _MAX_SERIES_TERMS):
        t = nu * _mpf_of(f(2, nu)) * power
        total += t
        power *= x0
        if abs(t) <= eps * (1 + abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise DomainError(f"local series derivative of {f.id} does not converge at x0={x0}")


def transfer_factor(f: MultiplicativeFunction, s) -> mpf:
    """2/S_f(2**-s) - 1: the ratio between the alternating and the plain main
    term at growth exponent s.  DomainError when S_f vanishes there."""
    s = mpf(s)
    val = bell_series_value(f, mpf(2) ** (-s))
    if abs(val) < mpf(2) ** (-(mp.prec // 2)):
        raise DomainError(f"local series of {f.id} vanishes at 2^-{s}")
    return 2 / val - 1


def kernel_dirichlet_sum(f: MultiplicativeFunction, s, depth: int = 160) -> mpf:
    """sum_{nu>=0} h_f(2**nu) 2**(-nu s), the kernel's Dirichlet series.
    Equals 2/S_f(2**-s) - 1 when both converge; the equality is a test."""
    from .convolution import kernel_of

    kern = kernel_of(f, depth)
    x = mpf(2) ** (-mpf(s))
    power = mpf(1)
    total = mpf(0)
    for nu in range(depth + 1):
        total += _mpf_of(kern[nu]) * power
        power *= x
    return total


def kernel_dirichlet_log_sum(f: MultiplicativeFunction, s, depth: int = 160) -> mpf:
    """sum_{nu>=0} h_f(2**nu) log(2**nu) 2**(-nu s).  Against the closed form
    -(log 2) 2^(1-s) S'_f(2^-s)/S_f(2^-s)^2 in tests."""
    from .convolution import kernel_of

    kern = kernel_of(f, depth)
    x = mpf(2) ** (-mpf(s))
    log2 = mp.log(2)
    power = mpf(1)
    total = mpf(0)
    for nu in range(depth + 1):
        total += _mpf_of(kern[nu]) * (nu * log2) * power
        power *= x
    return total


# --- Dirichlet series: partial sums and closed forms ---


def alternating_dirichlet_partial(
    f: MultiplicativeFunction, s, terms: int, table: SpfTable | None = None
) -> mpf:
    """Partial sum sum_{n<=terms} (-1)^(n-1) f(n) n^-s in float64 with exact
    (fsum) accumulation; plenty for the 1e-5/1e-6 cross-checks it serves."""
    from .functions import sieve_values

    if table is None or table.limit < terms:
        table = build_spf(terms)
    vals = sieve_values(f, terms, table)
    sf = float(s)
    acc = math.fsum(
        (float(vals[n]) if n % 2 else -float(vals[n])) * n ** (-sf)
        for n in range(1, terms + 1)
    )
    return mpf(acc)


def dirichlet_euler_product(f: MultiplicativeFunction, s, ctx: ConstantsContext) -> ConstantResult:
    """D(f,s) = sum f(n)/n^s as the Euler product of local sums
    sum_nu f(p**nu) p**(-nu s) over primes <= ctx.prime_limit."""
    s = mpf(s)

    def local(p: int) -> mpf:
        ps = mpf(p) ** (-s)

        def term(nu: int) -> mpf:
            return _mpf_of(f(p, nu)) * ps**nu

        return 1 + _geometric_series(term, start=1, what=f"local sum of {f.id} at p={p}")

    return prime_product(local, ctx)


def alternating_dirichlet_closed_form(
    f: MultiplicativeFunction, s, ctx: ConstantsContext | None = None
) -> mpf:
    """Alternating Dirichlet series via its factorization:
    D_altern(f,s) = D(f,s) * (2/S_f(2^-s) - 1)."""
    if ctx is None:
        ctx = ConstantsContext()
    s = mpf(s)
    factor = transfer_factor(f, s)  # raises DomainError on a vanishing local series
    base = dirichlet_euler_product(f, s, ctx)
    with ctx.workprec():
        return base.value * factor


# --- Wintner-type mean values ---


def _local_mean_sum(f: MultiplicativeFunction, p: int, reciprocal: bool) -> mpf:
    """Local factor sum: sum_nu f(p**nu) p**(-nu), or, for the logarithmic
    mean of 1/f, the unweighted sum_nu 1/f(p**nu) (the 1/n weight absorbs
    the p**(-nu))."""
    pinv = mpf(1) / p

    def term(nu: int) -> mpf:
        v = f(p, nu)
        if reciprocal:
            if v == 0:
                raise DomainError(f"{f.id} vanishes at {p}^{nu}; reciprocal mean undefined")
            return 1 / _mpf_of(v)
        return _mpf_of(v) * pinv**nu

    kind = "reciprocal local sum" if reciprocal else "local sum"
    return 1 + _geometric_series(term, start=1, what=f"{kind} of {f.id} at p={p}")


def _check_decay(
    contribs: Callable[[int], mpf], ctx: ConstantsContext, what: str, stride: int = 1
) -> None:
    """Empirical convergence test: per-prime contributions summed over the last
    two decades below prime_limit must decay markedly (geometric heuristic;
    borderline cases are rejected conservatively).  stride > 1 samples every
    stride-th prime, which preserves the decade ratio."""
    lo, mid = _decade_windows(ctx)
    d_prev = mpf(0)
    d_last = mpf(0)
    for i, p in enumerate(ctx.primes()):
        if p <= lo or i % stride:
            continue
        c = abs(contribs(p))
        if p > mid:
            d_last += c
        else:
            d_prev += c
    if d_last == 0:
        return
    if d_prev <= 0 or d_last / d_prev >= 0.75:
        raise DomainError(f"{what}: prime contributions do not decay, mean value undefined")


def _wintner_conditions(f: MultiplicativeFunction, ctx: ConstantsContext, reciprocal: bool) -> None:
    if reciprocal:
        # sum over p of |1/f(p) - 1/p| must converge
        def head(p: int) -> mpf:
            v = f(p, 1)
            if v == 0:
                raise DomainError(f"{f.id} vanishes at p={p}; reciprocal mean undefined")
            return abs(1 / _mpf_of(v) - mpf(1) / p)

    else:
        # sum over p of |f(p) - 1| / p must converge
        def head(p: int) -> mpf:
            return abs(_mpf_of(f(p, 1)) - 1) / p

    _check_decay(head, ctx, f"mean-value condition on {f.id} at nu=1")

    # second condition: sum over p of sum_{nu>=2} |f(p^nu)|/p^nu, or of
    # sum_{nu>=2} 1/|f(p^nu)| in the reciprocal case
    def deeper(p: int) -> mpf:
        pinv = mpf(1) / p

        def term(nu: int) -> mpf:
            v = f(p, nu)
            if reciprocal:
                if v == 0:
                    raise DomainError(f"{f.id} vanishes at {p}^{nu}; reciprocal mean undefined")
                return 1 / abs(_mpf_of(v))
            return abs(_mpf_of(v)) * pinv**nu

        return _geometric_series(term, start=2, what=f"deep condition of {f.id} at p={p}")

    _check_decay(deeper, ctx, f"mean-value condition on {f.id} at nu>=2", stride=41)


def _zero_branch_threshold() -> mpf:
    return mpf(2) ** (-(mp.prec // 2))


def mean_value(f: MultiplicativeFunction, ctx: ConstantsContext | None = None) -> ConstantResult:
    """Wintner mean M(f) = prod_p (1-1/p) sum_nu f(p^nu)/p^nu.  Conditions are
    checked empirically on the prime range; DomainError on apparent divergence."""
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        _wintner_conditions(f, ctx, reciprocal=False)
        if abs(bell_series_value(f, mpf(1) / 2)) < _zero_branch_threshold():
            # vanishing local sum at p=2 forces M(f) = 0
            return ConstantResult(mpf(0), mpf(0), ctx.prime_limit)
    return prime_product(lambda p: (1 - mpf(1) / p) * _local_mean_sum(f, p, False), ctx)


def mean_value_alternating(
    f: MultiplicativeFunction, ctx: ConstantsContext | None = None
) -> ConstantResult:
    """Mean of n -> (-1)^(n-1) f(n): M(f)(2/S-1) with S the local sum at p=2,
    or the product over odd primes alone when S = 0."""
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        _wintner_conditions(f, ctx, reciprocal=False)
        s2 = bell_series_value(f, mpf(1) / 2)
        if abs(s2) < _zero_branch_threshold():
            return prime_product(
                lambda p: 1 if p == 2 else (1 - mpf(1) / p) * _local_mean_sum(f, p, False), ctx
            )
        base = prime_product(lambda p: (1 - mpf(1) / p) * _local_mean_sum(f, p, False), ctx)
        factor = 2 / s2 - 1
        return ConstantResult(base.value * factor, base.tail_estimate * abs(factor), ctx.prime_limit)


def log_mean_reciprocal(
    f: MultiplicativeFunction, ctx: ConstantsContext | None = None
) -> ConstantResult:
    """Logarithmic mean of 1/f: lim (1/log x) sum_{n<=x} 1/f(n), equal to
    prod_p (1-1/p) sum_nu 1/f(p^nu) under the stated conditions."""
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        _wintner_conditions(f, ctx, reciprocal=True)
    return prime_product(lambda p: (1 - mpf(1) / p) * _local_mean_sum(f, p, True), ctx)


def log_mean_reciprocal_alternating(
    f: MultiplicativeFunction, ctx: ConstantsContext | None = None
) -> ConstantResult:
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        _wintner_conditions(f, ctx, reciprocal=True)
        s2 = 1 + _geometric_series(
            lambda nu: mpf(1) / _mpf_of(f(2, nu)),
            start=1,
            what=f"reciprocal local sum of {f.id} at p=2",
        )
        if abs(s2) < _zero_branch_threshold():
            return prime_product(
                lambda p: 1 if p == 2 else (1 - mpf(1) / p) * _local_mean_sum(f, p, True), ctx
            )
        base = prime_product(lambda p: (1 - mpf(1) / p) * _local_mean_sum(f, p, True), ctx)
        factor = 2 / s2 - 1
        return ConstantResult(base.value * factor, base.tail_estimate * abs(factor), ctx.prime_limit)


# --- the named constants of the asymptotic main terms ---


def _const_A(ctx: ConstantsContext) -> ConstantResult:
    return _rounding_result(zeta(2) * zeta(3) / zeta(6))


def _const_B(ctx: ConstantsContext) -> ConstantResult:
    return prime_sum(lambda p: mp.log(p) / (mpf(p) ** 2 - p + 1), ctx)


def _const_C(ctx: ConstantsContext) -> ConstantResult:
    return prime_product(lambda p: 1 - mpf(1) / (mpf(p) * (p + 1)), ctx)


def _const_D(ctx: ConstantsContext) -> ConstantResult:
    return prime_sum(lambda p: mp.log(p) / (mpf(p) ** 2 + p - 1), ctx)


def _alpha(p: int) -> mpf:
    s = _geometric_series(
        lambda j: 1 / ((mpf(p) ** j - 1) * (mpf(p) ** (j + 1) - 1)),
        what=f"alpha series at p={p}",
    )
    return 1 - (mpf(p) - 1) ** 2 / p * s


def _beta_p(p: int) -> mpf:
    return _geometric_series(
        lambda j: j / ((mpf(p) ** j - 1) * (mpf(p) ** (j + 1) - 1)),
        what=f"beta series at p={p}",
    )


def _const_E(ctx: ConstantsContext) -> ConstantResult:
    return prime_product(_alpha, ctx)


def _const_F(ctx: ConstantsContext) -> ConstantResult:
    return prime_sum(
        lambda p: (mpf(p) - 1) ** 2 * _beta_p(p) * mp.log(p) / (p * _alpha(p)), ctx
    )


def _const_K(ctx: ConstantsContext) -> ConstantResult:
    value = _geometric_series(lambda j: mpf(1) / (mpf(2) ** (j + 1) - 1), start=0, what="K")
    return _rounding_result(value)


def _const_K_prime(ctx: ConstantsContext) -> ConstantResult:
    value = _geometric_series(lambda j: mpf(j) / (mpf(2) ** (j + 1) - 1), start=1, what="K'")
    return _rounding_result(value)


def _const_A_1(ctx: ConstantsContext) -> ConstantResult:
    base = prime_product(
        lambda p: mp.sqrt(mpf(p) ** 2 - p) * mp.log(mpf(p) / (p - 1)), ctx
    )
    with ctx.workprec():
        value = base.value / mp.sqrt(mp.pi)
        tail = base.tail_estimate / mp.sqrt(mp.pi)
    return ConstantResult(value, tail, ctx.prime_limit)


def _gcd_sum_at(p: int, nu: int) -> mpf:
    # gcd-sum at prime powers: p^(nu-1) (p (nu+1) - nu)
    return mpf(p) ** (nu - 1) * (mpf(p) * (nu + 1) - nu)


def _const_K_0(ctx: ConstantsContext) -> ConstantResult:
    def local(p: int) -> mpf:
        s = 1 + _geometric_series(
            lambda nu: 1 / _gcd_sum_at(p, nu), what=f"gcd-sum reciprocal at p={p}"
        )
        return mp.sqrt(1 - mpf(1) / p) * s

    base = prime_product(local, ctx)
    with ctx.workprec():
        value = 2 * base.value / mp.sqrt(mp.pi)
        tail = 2 * base.tail_estimate / mp.sqrt(mp.pi)
    return ConstantResult(value, tail, ctx.prime_limit)


def _abelian_C(j: int) -> mpf:
    # prod over k >= 1, k != j of zeta(k/j); factors tend to 1 geometrically
    eps = mpf(2) ** (-(mp.prec + 8))
    value = mpf(1)
    for k in range(1, _MAX_SERIES_TERMS):
        if k == j:
            continue
        arg = mpf(k) / j
        z = zeta_via_eta(arg) if arg < 1 else _zeta_em(arg)
        value *= z
        if k > j and abs(z - 1) < eps:
            return value
    raise DomainError("zeta product did not settle")


def _abelian_K(j: int) -> mpf:
    eps = mpf(2) ** (-(mp.prec + 8))
    prod = mpf(1)
    for k in range(1, _MAX_SERIES_TERMS):
        fac = 1 - mpf(2) ** (-mpf(k) / j)
        prod *= fac
        if abs(1 - fac) < eps:
            return 2 * prod - 1
    raise DomainError("dyadic product did not settle")


def _const_q_product(ctx: ConstantsContext) -> ConstantResult:
    eps = mpf(2) ** (-(mp.prec + 8))
    prod = mpf(1)
    for k in range(1, _MAX_SERIES_TERMS):
        fac = 1 - mpf(2) ** (-k)
        prod *= fac
        if abs(1 - fac) < eps:
            return _rounding_result(prod)
    raise DomainError("dyadic product did not settle")


def _const_D_abelian(ctx: ConstantsContext) -> ConstantResult:
    def local(p: int) -> mpf:
        pinv = mpf(1) / p

        def term(k: int) -> mpf:
            return (mpf(1) / partition_count(k) - mpf(1) / partition_count(k - 1)) * pinv**k

        return 1 + _geometric_series(term, start=2, what=f"partition series at p={p}")

    return prime_product(local, ctx)


def _const_C_tilde(ctx: ConstantsContext) -> ConstantResult:
    return prime_product(
        lambda p: 1 - (mpf(p) ** 2 + p - 1) / (mpf(p) ** 3 * (p + 1)), ctx
    )


def _const_kappa_star_A(ctx: ConstantsContext) -> ConstantResult:
    # Raw factors decay like p^(-3/2); pairing each with (1 - p^(-3/2)) and
    # compensating by zeta(3/2) outside brings the decay to p^(-5/2).
    def local(p: int) -> mpf:
        r = mp.sqrt(mpf(p))
        return (1 + (r - 1) / (p * (p - r + 1))) * (1 - 1 / (p * r))

    base = prime_product(local, ctx)
    with ctx.workprec():
        z = zeta(mpf(3) / 2)
        return ConstantResult(base.value * z, base.tail_estimate * z, ctx.prime_limit)


def _const_kappa_star_B(ctx: ConstantsContext) -> ConstantResult:
    # Same device with exponent 4/3.
    def local(p: int) -> mpf:
        c = mpf(p) ** (mpf(1) / 3)
        return (1 + (c - 1) / (p * (c * c - c + 1))) * (1 - 1 / (p * c))

    base = prime_product(local, ctx)
    with ctx.workprec():
        z = zeta(mpf(4) / 3)
        return ConstantResult(base.value * z, base.tail_estimate * z, ctx.prime_limit)


def _const_A_star(ctx: ConstantsContext) -> ConstantResult:
    base = _const_kappa_star_A(ctx)
    with ctx.workprec():
        factor = (9 - 12 * mp.sqrt(2)) / 23
        return ConstantResult(
            base.value * factor, base.tail_estimate * abs(factor), ctx.prime_limit
        )


def _const_B_star(ctx: ConstantsContext) -> ConstantResult:
    base = _const_kappa_star_B(ctx)
    with ctx.workprec():
        c13 = mpf(2) ** (mpf(1) / 3)
        c53 = mpf(2) ** (mpf(5) / 3)
        factor = (c53 - 3 * c13 - 1) / (c53 - c13 + 1)
        return ConstantResult(
            base.value * factor, base.tail_estimate * abs(factor), ctx.prime_limit
        )


def _const_c_1(ctx: ConstantsContext) -> ConstantResult:
    # Two zeta(3/2) factors pulled out; what is left decays like p^(-3).
    def local(p: int) -> mpf:
        v = 1 / (mpf(p) * mp.sqrt(mpf(p)))
        return (1 + 2 * v - v / p) * (1 - v) ** 2

    base = prime_product(local, ctx)
    with ctx.workprec():
        z2 = zeta(mpf(3) / 2) ** 2
        return ConstantResult(base.value * z2, base.tail_estimate * z2, ctx.prime_limit)


def _const_c_2(ctx: ConstantsContext) -> ConstantResult:
    # The prime-by-prime form of this coefficient diverges term by term; the
    # value meant is the continued one, tied to the unitary-kernel product:
    # c_2 = kappa_star_B * zeta(2/3) / zeta(2).  (Negative: zeta(2/3) < 0.)
    base = _const_kappa_star_B(ctx)
    with ctx.workprec():
        factor = zeta_via_eta(mpf(2) / 3) / zeta(2)
        return ConstantResult(
            base.value * factor, base.tail_estimate * abs(factor), ctx.prime_limit
        )


def _const_C_star_star(ctx: ConstantsContext) -> ConstantResult:
    def local(p: int) -> mpf:
        q = mpf(p)
        return 1 - 2 / q**3 + 1 / q**4 + 1 / q**5 - 1 / q**6

    base = prime_product(local, ctx)
    with ctx.workprec():
        pref = zeta(2) * zeta(3)
        return ConstantResult(base.value * pref, base.tail_estimate * pref, ctx.prime_limit)


def _const_c_exponent(ctx: ConstantsContext) -> ConstantResult:
    return _rounding_result(mp.log(mpf(9) / 10) / mp.log(2))


_CONSTANTS: dict[str, Callable[[ConstantsContext], ConstantResult]] = {
    "A": _const_A,
    "B": _const_B,
    "C": _const_C,
    "D": _const_D,
    "E": _const_E,
    "F": _const_F,
    "K": _const_K,
    "K_prime": _const_K_prime,
    "A_1": _const_A_1,
    "K_0": _const_K_0,
    "C_1": lambda ctx: _rounding_result(_abelian_C(1)),
    "C_2": lambda ctx: _rounding_result(_abelian_C(2)),
    "C_3": lambda ctx: _rounding_result(_abelian_C(3)),
    "K_1": lambda ctx: _rounding_result(_abelian_K(1)),
    "K_2": lambda ctx: _rounding_result(_abelian_K(2)),
    "K_3": lambda ctx: _rounding_result(_abelian_K(3)),
    "q_product": _const_q_product,
    "D_abelian": _const_D_abelian,
    "C_tilde": _const_C_tilde,
    "kappa_star_A": _const_kappa_star_A,
    "kappa_star_B": _const_kappa_star_B,
    "A_star": _const_A_star,
    "B_star": _const_B_star,
    "c_1": _const_c_1,
    "c_2": _const_c_2,
    "C_star_star": _const_C_star_star,
    "c": _const_c_exponent,
}


def constant_ids() -> list[str]:
    return list(_CONSTANTS)


def named_constant(cid: str, ctx: ConstantsContext | None = None) -> ConstantResult:
    if cid not in _CONSTANTS:
        raise DomainError(f"unknown constant {cid!r}; known: {', '.join(constant_ids())}")
    if ctx is None:
        ctx = ConstantsContext()
    with ctx.workprec():
        return _CONSTANTS[cid](ctx)
