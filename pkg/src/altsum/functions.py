"""Registry of multiplicative arithmetic functions and batch evaluation.

Every function here is multiplicative with f(1) = 1 and is defined by its
values on prime powers.  Values are exact: Python ints for integer-valued
functions, rationals for reciprocals.  Reciprocals 1/f are obtained with
`reciprocal_of` (or the id spelling "1/phi") and are defined only where f
never vanishes.

Batch evaluation is driven by a smallest-prime-factor table: writing
n = q * m with q the spf-power part of n and gcd(q, m) = 1 gives
f(n) = f(q) * f(m) with m < n, one multiplication per n after the table
lookup, so a full value array up to x costs O(x) multiplications.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from gmpy2 import mpq

from .errors import CapacityError, DomainError
from .sieve import SpfTable, factorize

PrimePowerRule = Callable[[int, int], int]

PARTITION_CAP = 10_000


@dataclass(frozen=True)
class MultiplicativeFunction:
    """A multiplicative function given by its prime-power rule.

    id : stable name used by the CLI and the model registry
    kind : "integer" or "rational" (the exact type of its values)
    rule : value at p**nu for prime p and nu >= 1; f(1) is always 1
    reciprocal : True when this is 1/f of a registered integer function
    """

    id: str
    kind: str
    rule: Callable[[int, int], int | Fraction]
    reciprocal: bool = False
    summary: str = ""

    def __call__(self, p: int, nu: int) -> int | Fraction:
        if nu == 0:
            return 1
        return self.rule(p, nu)


# --- partition numbers, used by the abelian-group counting function ---

_partition_cache = [1, 1]


def partition_count(k: int) -> int:
    """Number of partitions of k, by Euler's pentagonal-number recurrence.

    P(0) = 1.  Values are cached; the recurrence costs O(k**1.5) overall.
    """
    if k < 0 or k > PARTITION_CAP:
        raise CapacityError(f"partition argument {k} outside [0, {PARTITION_CAP}]")
    while len(_partition_cache) <= k:
        n = len(_partition_cache)
        total = 0
        j = 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > n:
                break
            sign = 1 if j % 2 else -1
            total += sign * _partition_cache[n - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= n:
                total += sign * _partition_cache[n - g2]
            j += 1
        _partition_cache.append(total)
    return _partition_cache[k]


def _divisor_count(k: int) -> int:
    d = 1
    for _, e in factorize(k):
        d *= e + 1
    return d


# --- prime-power rules ---


def _phi(p, nu):
    return p**nu - p ** (nu - 1)


def _psi(p, nu):
    return p**nu + p ** (nu - 1)


def _sigma(p, nu):
    return (p ** (nu + 1) - 1) // (p - 1)


def _tau(p, nu):
    return nu + 1


def _gcd_sum(p, nu):
    # sum_{k<=p^nu} gcd(k, p^nu) on prime powers
    return p ** (nu - 1) * (p * (nu + 1) - nu)


def _kappa(p, nu):
    return p


def _mu_sq(p, nu):
    return 1 if nu == 1 else 0


def _abelian(p, nu):
    return partition_count(nu)


def _sigma_star(p, nu):
    return p**nu + 1


def _phi_star(p, nu):
    return p**nu - 1


def _kappa_star(p, nu):
    return p if nu == 1 else 1


def _pow(p, nu):
    return p**nu if nu >= 2 else 1


def _sigma_bi(p, nu):
    s = (p ** (nu + 1) - 1) // (p - 1)
    return s if nu % 2 else s - p ** (nu // 2)


def _beta(p, nu):
    num = p ** (nu + 1) + (-1) ** nu
    assert num % (p + 1) == 0
    return num // (p + 1)


def _tau_e(p, nu):
    return _divisor_count(nu)


def _wintner_demo(p, nu):
    if nu == 1:
        return 1
    if nu == 2:
        return -6
    return 0


REGISTRY: dict[str, MultiplicativeFunction] = {}


def _register(fid: str, rule: PrimePowerRule, summary: str) -> None:
    REGISTRY[fid] = MultiplicativeFunction(id=fid, kind="integer", rule=rule, summary=summary)


_register("phi", _phi, "Euler totient")
_register("psi", _psi, "Dedekind psi")
_register("sigma", _sigma, "sum of divisors")
_register("tau", _tau, "number of divisors")
_register("gcd_sum", _gcd_sum, "Pillai gcd-sum: sum of gcd(k, n) for k <= n")
_register("kappa", _kappa, "squarefree kernel (radical)")
_register("mu_sq", _mu_sq, "squarefree indicator (mu squared)")
_register("abelian", _abelian, "number of abelian groups of order n")
_register("sigma_star", _sigma_star, "sum of unitary divisors")
_register("phi_star", _phi_star, "unitary totient")
_register("kappa_star", _kappa_star, "unitary squarefree kernel")
_register("pow", _pow, "powerful part of n")
_register("sigma_bi", _sigma_bi, "sum of bi-unitary divisors")
_register("beta", _beta, "sum of d * lambda(n/d) over divisors d")
_register("tau_e", _tau_e, "number of exponential divisors")
_register("wintner_demo", _wintner_demo, "demo with vanishing mean value branch")


def reciprocal_of(f: MultiplicativeFunction) -> MultiplicativeFunction:
    """The pointwise reciprocal 1/f, defined where f never vanishes."""
    if f.reciprocal:
        raise DomainError(f"{f.id} is already a reciprocal")

    def rule(p: int, nu: int) -> Fraction:
        v = f.rule(p, nu)
        if v == 0:
            raise DomainError(f"{f.id}({p}^{nu}) = 0; reciprocal undefined")
        return Fraction(1, v) if isinstance(v, int) else 1 / Fraction(v)

    return MultiplicativeFunction(
        id="1/" + f.id,
        kind="rational",
        rule=rule,
        reciprocal=True,
        summary="reciprocal of " + (f.summary or f.id),
    )


def get_function(spec: str) -> MultiplicativeFunction:
    """Resolve a function id; the spelling "1/<id>" selects the reciprocal."""
    fid = spec.strip()
    recip = fid.startswith("1/")
    if recip:
        fid = fid[2:]
    if fid not in REGISTRY:
        raise DomainError(f"unknown function id {spec!r}; known: {', '.join(REGISTRY)}")
    f = REGISTRY[fid]
    return reciprocal_of(f) if recip else f


def function_ids() -> list[str]:
    return list(REGISTRY)


def evaluate(
    f: MultiplicativeFunction,
    n: int,
    table: SpfTable | None = None,
    factors: Sequence[tuple[int, int]] | None = None,
) -> int | Fraction:
    """f(n) from the factorization of n (computed via `table` unless given)."""
    if n < 1:
        raise DomainError(f"arguments must be positive, got {n}")
    if factors is None:
        factors = factorize(n, table)
    out: int | Fraction = 1
    for p, e in factors:
        out *= f.rule(p, e)
    return out


def _exact(v: int | Fraction):
    return v if isinstance(v, int) else mpq(v.numerator, v.denominator)


def sieve_values(f: MultiplicativeFunction, x: int, table: SpfTable) -> list:
    """Values f(1..x) as a list indexed by n (slot 0 is a zero filler).

    Integer functions come back as ints; rationals as gmpy2.mpq (exact,
    GMP-backed -- the downstream summation layer relies on that).  One
    multiplication per n, after the prime-power values are materialized.
    """
    if x > table.limit:
        raise CapacityError(f"{x} exceeds sieve limit {table.limit}")
    if x < 1:
        raise DomainError("x must be positive")
    spf = table.spf_list(x)
    one = 1
    vals = [0] * (x + 1)
    vals[1] = one
    # pp[n] = spf(n)-power part of n, e[n] = its exponent, for n in range
    pp = [0] * (x + 1)
    e = [0] * (x + 1)
    fq: dict[int, object] = {}
    for n in range(2, x + 1):
        p = spf[n]
        m = n // p
        if m % p:
            q = p
            nu = 1
        else:
            q = pp[m] * p
            nu = e[m] + 1
        pp[n] = q
        e[n] = nu
        if q == n:
            v = _exact(f.rule(p, nu))
            fq[q] = v
            vals[n] = v
        else:
            vals[n] = fq[q] * vals[n // q]
    return vals
