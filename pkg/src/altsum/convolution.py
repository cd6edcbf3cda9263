"""Convolution kernels on powers of two and exact signed partial sums.

For multiplicative f with local series S(x) = sum f(2**nu) x**nu and
reciprocal coefficients b_nu, the kernel

    h(1) = 1,   h(2**nu) = 2 b_nu  (nu >= 1),   h(p**nu) = 0  (p > 2)

satisfies (-1)**(n-1) f(n) = sum_{d j = n} h(d) f(j) for every n, identically.
Summing over n <= x turns the alternating sum into a short linear combination
of plain prefix sums of f at thresholds x // 2**nu, which is both the source
of the main-term constants and a fast second route used here to cross-check
the direct summation exactly.

Also here: partial sums twisted by the generalized signs t_Q (sign -1 exactly
when some prime of Q divides n), which reduce to (-1)**(n-1) for Q = {2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, DomainError, VerificationError
from .exact import alternating_weight, as_mpq, pairwise_sum, prefix_sums_at, to_fraction
from .functions import MultiplicativeFunction, evaluate, sieve_values
from .series import CoefficientSeries, bell_coeffs, reciprocal_coeffs
from .sieve import SpfTable, factorize, two_adic_valuation


@dataclass(frozen=True)
class Kernel:
    """Kernel values on powers of two: values[nu] = h(2**nu), values[0] = 1."""

    source_id: str
    values: CoefficientSeries  # origin "kernel"

    def __getitem__(self, nu: int) -> Fraction:
        return self.values.coeffs[nu]

    def depth(self) -> int:
        return len(self.values.coeffs) - 1


def kernel_of(f: MultiplicativeFunction, n: int) -> Kernel:
    """Exact kernel values h(2**nu) for nu = 0..n."""
    b = reciprocal_coeffs(bell_coeffs(f, n))
    vals = [Fraction(1)] + [2 * c for c in b.coeffs[1:]]
    series = CoefficientSeries(function_id=f.id, origin="kernel", coeffs=vals)
    return Kernel(source_id=f.id, values=series)


def _exact_kernel(f: MultiplicativeFunction, n: int) -> list:
    """Kernel values as ints (integer f) or gmpy2 rationals, for tight loops."""
    kern = kernel_of(f, n)
    out = []
    for c in kern.values.coeffs:
        out.append(int(c) if c.denominator == 1 else as_mpq(c))
    return out


def verify_convolution(f: MultiplicativeFunction, x: int, table: SpfTable) -> bool:
    """Check (-1)**(n-1) f(n) = sum_{2**nu | n} h(2**nu) f(n / 2**nu) for all
    n <= x, exactly.  True iff every n passes."""
    vals = sieve_values(f, x, table)
    kern = _exact_kernel(f, max(1, x.bit_length()))
    for n in range(1, x + 1):
        v2 = two_adic_valuation(n)
        rhs = vals[n]  # nu = 0 term
        m = n
        for nu in range(1, v2 + 1):
            m >>= 1
            rhs += kern[nu] * vals[m]
        lhs = vals[n] if n % 2 else -vals[n]
        if lhs != rhs:
            return False
    return True


def alternating_sum_direct(f: MultiplicativeFunction, x: int, table: SpfTable):
    """sum_{n<=x} (-1)**(n-1) f(n), exact, by direct sieve and summation."""
    vals = sieve_values(f, x, table)
    return prefix_sums_at(vals, [x], weight=alternating_weight)[x]


def alternating_sum_via_kernel(f: MultiplicativeFunction, x: int, table: SpfTable):
    """Same sum through the kernel route:
    sum_{2**nu <= x} h(2**nu) * sum_{j <= x//2**nu} f(j).

    Must agree with the direct route exactly; the equality is a standing test.
    All inner prefix sums come from one pass over a shared value array.
    """
    vals = sieve_values(f, x, table)
    return _kernel_sum_from_values(f, x, vals)


def _kernel_sum_from_values(f: MultiplicativeFunction, x: int, vals: list):
    depth = x.bit_length() - 1
    kern = _exact_kernel(f, max(1, depth))
    thresholds = [x >> nu for nu in range(depth + 1)]
    prefix = prefix_sums_at(vals, thresholds)
    return pairwise_sum([kern[nu] * prefix[x >> nu] for nu in range(depth + 1)])


def alternating_sums_at(f: MultiplicativeFunction, grid: list[int], table: SpfTable) -> dict:
    """Exact alternating sums at every x in grid from one shared array."""
    if not grid:
        return {}
    vals = sieve_values(f, max(grid), table)
    return prefix_sums_at(vals, grid, weight=alternating_weight)


def plain_sums_at(f: MultiplicativeFunction, grid: list[int], table: SpfTable) -> dict:
    """Exact plain partial sums at every x in grid from one shared array."""
    if not grid:
        return {}
    vals = sieve_values(f, max(grid), table)
    return prefix_sums_at(vals, grid)


# --- generalized signs ---


def validate_qset(q: tuple[int, ...] | list[int] | set[int]) -> tuple[int, ...]:
    """Normalize a finite prime set: ascending tuple, all entries prime."""
    qs = sorted(set(int(v) for v in q))
    for v in qs:
        if v < 2 or factorize(v) != [(v, 1)]:
            raise DomainError(f"Q must contain primes only, got {v}")
    return tuple(qs)


def tq_sign(n: int, q: tuple[int, ...]) -> int:
    """+1 when no prime of Q divides n, else -1."""
    for p in q:
        if n % p == 0:
            return -1
    return 1


def tq_sum(
    f: MultiplicativeFunction,
    q: tuple[int, ...] | list[int] | set[int],
    x: int,
    table: SpfTable,
):
    """sum_{n<=x} t_Q(n) f(n), exact.

    Signs are evaluated by direct divisibility against Q.  For f = sigma the
    same value is recomputed through the Q-kernel (supported on Q-smooth
    numbers with exponents <= 2) and the two must agree exactly; a mismatch
    raises VerificationError.
    """
    qs = validate_qset(q)
    vals = sieve_values(f, x, table)
    direct = prefix_sums_at(vals, [x], weight=lambda n: tq_sign(n, qs))[x]
    if f.id == "sigma":
        viakernel = _tq_sum_sigma_kernel(qs, x, vals)
        if viakernel != direct:
            raise VerificationError(
                f"Q-kernel route disagrees with direct: {viakernel} != {direct}"
            )
    return direct


def _q_kernel_divisors(qs: tuple[int, ...], x: int):
    """(d, h_Q(d)) over Q-smooth d <= x with exponents <= 2, h_Q multiplicative
    with h_Q(p) = -(p+1), h_Q(p**2) = p, zero beyond."""
    out = [(1, 1)]
    for p in qs:
        extended = []
        for d, h in out:
            extended.append((d, h))
            if d * p <= x:
                extended.append((d * p, h * -(p + 1)))
            if d * p * p <= x:
                extended.append((d * p * p, h * p))
        out = extended
    return [(d, h) for d, h in out if d <= x]


def _tq_sum_sigma_kernel(qs: tuple[int, ...], x: int, vals: list):
    """Kernel route for sigma: sum_{n<=x} c_Q(n) sigma(n) = sum_d h_Q(d) S_sigma(x//d)
    with c_Q the coprimality indicator; then t_Q = 2 c_Q - 1."""
    dk = _q_kernel_divisors(qs, x)
    prefix = prefix_sums_at(vals, [x // d for d, _ in dk])
    coprime_part = sum(h * prefix[x // d] for d, h in dk)
    return 2 * coprime_part - prefix[x]


def tq_multiplicativity_probe(
    q: tuple[int, ...] | list[int] | set[int], bound: int = 1000
) -> tuple[bool, tuple[int, int] | None]:
    """Brute-force test of multiplicativity of n -> t_Q(n) over coprime pairs
    m, n <= bound.  Returns (is_multiplicative, witness), witness being the
    first violating pair.  Mathematically this is an iff for |Q| <= 1."""
    qs = validate_qset(q)
    signs = [0] + [tq_sign(n, qs) for n in range(1, bound * bound + 1)]
    for m in range(2, bound + 1):
        for n in range(m + 1, bound + 1):
            if math.gcd(m, n) != 1:
                continue
            if signs[m * n] != signs[m] * signs[n]:
                return False, (m, n)
    return True, None


# --- exact identity checks for the squarefree-kernel reciprocal ---


def kk_identity_check(x: int, table: SpfTable, values: list | None = None) -> bool:
    """Exact rational identity for K(x) = sum_{n<=x} 1/kappa(n):

        K_alt(x) = K(x) - 2 * sum_{2 <= 2**nu <= x} 2**(-nu) K(x // 2**nu)

    with K_alt the alternating analogue.  Both sides are exact rationals;
    returns True iff they are equal (they must be; this realizes the kernel
    identity for 1/kappa where h(2**nu) = -2**(1-nu)).
    """
    from .functions import REGISTRY, reciprocal_of

    if values is None:
        values = sieve_values(reciprocal_of(REGISTRY["kappa"]), x, table)
    lhs = prefix_sums_at(values, [x], weight=alternating_weight)[x]
    depth = x.bit_length() - 1
    thresholds = [x >> nu for nu in range(depth + 1)]
    prefix = prefix_sums_at(values, thresholds)
    rhs = prefix[x] - 2 * pairwise_sum(
        [prefix[x >> nu] / as_mpq(2**nu) for nu in range(1, depth + 1)]
    )
    return to_fraction(lhs) == to_fraction(rhs)


def kk_sign_probe(grid: list[int], table: SpfTable) -> list[tuple[int, Fraction]]:
    """Data series of ratios K_alt(x) / K(x) on the grid; exact rationals.

    The trend (drift toward -1, very slowly) is an asymptotic statement --
    emitted as data, never asserted.
    """
    from .functions import REGISTRY, reciprocal_of

    if not grid:
        return []
    grid = sorted(set(grid))
    values = sieve_values(reciprocal_of(REGISTRY["kappa"]), max(grid), table)
    alt = prefix_sums_at(values, grid, weight=alternating_weight)
    plain = prefix_sums_at(values, grid)
    return [(x, to_fraction(alt[x]) / to_fraction(plain[x])) for x in grid]


def alternating_sum_example(f: MultiplicativeFunction, x: int) -> Fraction:
    """Tiny-x reference route via per-n evaluation; used in tests as a third
    oracle independent of the sieve machinery."""
    total = Fraction(0)
    for n in range(1, x + 1):
        total += (1 if n % 2 else -1) * to_fraction(evaluate(f, n))
    return total
