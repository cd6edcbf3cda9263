"""Runtime configuration with layered overrides.

Precedence, highest first: explicit flag values, config file entries,
environment, built-in defaults.  Config files are plain key=value lines;
'#' starts a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .constants import DEFAULT_PRECISION_BITS, DEFAULT_PRIME_LIMIT, MIN_PRECISION_BITS
from .errors import DomainError
from .sieve import HARD_CAP

ENV_SIEVE_CAP = "ALTSUM_SIEVE_CAP"
OUTPUT_FORMATS = ("plain", "csv", "json")


@dataclass(frozen=True)
class Config:
    sieve_cap: int = HARD_CAP
    prime_limit: int = DEFAULT_PRIME_LIMIT
    precision_bits: int = DEFAULT_PRECISION_BITS
    grid: tuple[int, ...] = tuple(2**k for k in range(10, 21))
    output_format: str = "plain"

    def __post_init__(self) -> None:
        if self.precision_bits < MIN_PRECISION_BITS:
            raise DomainError(f"precision_bits must be at least {MIN_PRECISION_BITS}")
        if not 10 <= self.sieve_cap <= HARD_CAP:
            raise DomainError(f"sieve_cap must lie in [10, {HARD_CAP}]")
        if self.prime_limit < 100:
            raise DomainError("prime_limit must be at least 100")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])) or not self.grid:
            raise DomainError("grid must be non-empty and strictly ascending")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"output format must be one of {OUTPUT_FORMATS}")


def parse_grid(spec: str) -> tuple[int, ...]:
    """Grid syntax: 'a:b' for powers of two 2^a..2^b, or explicit
    comma-separated values."""
    spec = spec.strip()
    try:
        if ":" in spec:
            lo, hi = spec.split(":", 1)
            a, b = int(lo), int(hi)
            if not (0 < a <= b < 64):
                raise ValueError
            return tuple(2**k for k in range(a, b + 1))
        return tuple(int(tok) for tok in spec.split(","))
    except ValueError:
        raise DomainError(f"cannot parse grid spec {spec!r}") from None


_PARSERS = {
    "sieve_cap": int,
    "prime_limit": int,
    "precision_bits": int,
    "grid": parse_grid,
    "output_format": str,
}


def read_config_file(path: str) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _PARSERS:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _PARSERS[key](val.strip())
    return values


def load_config(
    path: str | None = None, env: dict | None = None, **overrides
) -> Config:
    """Assemble a Config from defaults, environment, optional file, and
    flag overrides (None values in overrides are skipped)."""
    if env is None:
        env = os.environ
    cfg = Config()
    cap = env.get(ENV_SIEVE_CAP)
    if cap is not None:
        try:
            cfg = replace(cfg, sieve_cap=int(cap))
        except ValueError:
            raise DomainError(f"{ENV_SIEVE_CAP} must be an integer") from None
    if path is not None:
        cfg = replace(cfg, **read_config_file(path))
    known = {f.name for f in fields(Config)}
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    unknown = cleaned.keys() - known
    if unknown:
        raise DomainError(f"unknown config overrides: {sorted(unknown)}")
    if cleaned:
        cfg = replace(cfg, **cleaned)
    return cfg
