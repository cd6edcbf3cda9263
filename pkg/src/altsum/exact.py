"""Exact summation helpers for int/rational value arrays.

Partial sums of reciprocal functions accumulate denominators with hundreds of
thousands of digits (the lcm of all values seen).  A pairwise (balanced tree)
reduction keeps almost all additions between numbers of comparable small size,
so the handful of expensive merges happen near the root only.  With gmpy2
rationals this makes exact sums at x = 10**6 a matter of seconds.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq


def to_fraction(v) -> Fraction:
    """Exact Fraction view of an int / Fraction / mpq value."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(v.numerator, v.denominator)


def pairwise_sum(values: list):
    """Sum a list of ints/rationals by balanced pairwise reduction (exact)."""
    xs = values
    n = len(xs)
    if n == 0:
        return 0
    while n > 1:
        half = [xs[i] + xs[i + 1] for i in range(0, n - 1, 2)]
        if n % 2:
            half.append(xs[-1])
        xs = half
        n = len(xs)
    return xs[0]


def prefix_sums_at(values: list, thresholds, lo: int = 1, weight=None) -> dict:
    """Exact prefix sums S(t) = sum_{lo <= n <= t} w(n) * values[n].

    values is indexed by n (values[0] ignored).  thresholds is any iterable of
    cutoffs within range; the result maps each threshold to its prefix sum.
    weight, if given, maps n to an int multiplier (e.g. alternating signs).
    Work is one pairwise reduction per segment between consecutive cutoffs.
    """
    ts = sorted(set(int(t) for t in thresholds))
    if ts and ts[0] < lo - 1:
        raise ValueError(f"threshold {ts[0]} below start {lo}")
    out = {}
    running = 0
    prev = lo - 1
    for t in ts:
        if weight is None:
            seg = values[prev + 1 : t + 1]
        else:
            seg = [weight(n) * values[n] for n in range(prev + 1, t + 1)]
        running = running + pairwise_sum(seg) if seg else running
        out[t] = running
        prev = t
    return out


def alternating_weight(n: int) -> int:
    return 1 if n % 2 else -1


def as_mpq(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)
