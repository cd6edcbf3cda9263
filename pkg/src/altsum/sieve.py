"""Smallest-prime-factor table and factorization built on it.

The table stores spf(n) for every n up to a limit, in a numpy int32 array
(4 bytes per entry, so the default hard cap of 10**8 costs ~400 MB).
Composites are marked by ascending primes, which fills each slot with its
smallest prime factor; entries left untouched are prime.  Factorization of
any n <= limit then walks spf repeatedly and costs O(log n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

HARD_CAP = 100_000_000


@dataclass
class SpfTable:
    """Smallest prime factors for 0..limit; spf[0] and spf[1] are unused (0, 1)."""

    limit: int
    spf: np.ndarray
    _aslist: list | None = field(default=None, repr=False)

    def spf_list(self, upto: int | None = None) -> list:
        """Python-int view of the table, cached; the batch evaluators in
        `functions` index it tightly and plain lists beat ndarray there."""
        n = self.limit if upto is None else upto
        if self._aslist is None or len(self._aslist) <= n:
            self._aslist = self.spf[: n + 1].tolist()
        return self._aslist


def build_spf(limit: int, cap: int = HARD_CAP) -> SpfTable:
    """Build the smallest-prime-factor table for 2..limit.

    Parameters
    ----------
    limit : int
        Largest integer covered, 2 <= limit <= cap.
    cap : int
        Capacity guard; exceeding it raises CapacityError rather than
        silently allocating hundreds of megabytes.
    """
    if limit < 2:
        raise CapacityError(f"sieve limit must be at least 2, got {limit}")
    if limit > cap:
        raise CapacityError(f"sieve limit {limit} exceeds capacity {cap}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    # untouched entries are prime: spf(p) = p
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    return SpfTable(limit=limit, spf=spf)


def factorize(n: int, table: SpfTable | None = None) -> list[tuple[int, int]]:
    """Return the factorization of n as [(p1, e1), (p2, e2), ...], p1 < p2 < ...

    With a table, n must satisfy 1 <= n <= table.limit.  Without one, plain
    trial division is used, capped at n <= 10**12 so a single call never
    stalls; batch work should always go through a table.
    """
    if n < 1:
        raise CapacityError(f"cannot factorize {n}")
    if table is not None:
        if n > table.limit:
            raise CapacityError(f"{n} exceeds sieve limit {table.limit}")
        out = []
        spf = table.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    if n > 10**12:
        raise CapacityError(f"{n} exceeds the trial-division cap 10**12; build a sieve")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def primes_up_to(limit: int, table: SpfTable | None = None) -> np.ndarray:
    """Ascending primes <= limit, as an int64 array (spf fixed points)."""
    if table is None:
        table = build_spf(limit)
    elif limit > table.limit:
        raise CapacityError(f"{limit} exceeds sieve limit {table.limit}")
    idx = np.arange(limit + 1, dtype=np.int64)
    return idx[2:][table.spf[2 : limit + 1] == idx[2:]]


def two_adic_valuation(n: int) -> int:
    """Exponent of 2 in n (n >= 1)."""
    return (n & -n).bit_length() - 1
