"""Foundational numeric types: exponents, truncated sequences, l^p norms.

Everything here is immutable and pure; summation order is fixed (ascending
index) so results are reproducible across runs and threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


def conjugate_exponent(p: float) -> float:
    """Return the Holder conjugate p/(p-1).

    Raises ValueError for p <= 1 (the conjugate diverges at p = 1).
    """
    if not p > 1:
        raise ValueError(f"exponent must satisfy p > 1, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Exponent:
    """A validated exponent p > 1 together with its Holder conjugate.

    The conjugate is always called ``conj`` (never q) so it cannot be
    confused with the geometric parameter of :class:`QParam`.
    """

    p: float
    conj: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "conj", conjugate_exponent(self.p))
        # 1/p + 1/conj = 1 holds by construction; guard against NaN/inf input.
        if not math.isfinite(self.p) or abs(1.0 / self.p + 1.0 / self.conj - 1.0) > 1e-12:
            raise ValueError(f"invalid exponent p={self.p}")


@dataclass(frozen=True)
class QParam:
    """The geometric parameter, strictly inside (0, 1)."""

    q: float

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie strictly in (0, 1), got {self.q}")


@dataclass(frozen=True)
class TruncatedSequence:
    """A finitely supported real sequence; entries beyond ``values`` are zero.

    Mathematical indexing is 1-based (use :meth:`at`); storage is a plain
    tuple.
    """

    values: tuple[float, ...]

    @classmethod
    def of(cls, values: Iterable[float]) -> "TruncatedSequence":
        return cls(tuple(float(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)

    def at(self, n: int) -> float:
        """Entry x_n with 1-based index; zero beyond the stored support."""
        if n < 1:
            raise IndexError(f"sequence index starts at 1, got {n}")
        return self.values[n - 1] if n <= len(self.values) else 0.0

    @property
    def support(self) -> int:
        return len(self.values)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def require_nonnegative(self, what: str = "sequence") -> None:
        for i, v in enumerate(self.values, start=1):
            if v < 0.0:
                raise ValueError(f"{what} must be nonnegative, entry {i} is {v}")


@dataclass(frozen=True)
class ToleranceConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_iter: int = 1000
    tail_threshold: float = 1e-16

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.tail_threshold <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def compensated_sum(terms: Sequence[float]) -> float:
    """Sum with compensated accumulation (exact up to final rounding).

    Backed by math.fsum, which tracks all partial round-off, so the result
    is correctly rounded regardless of term count or magnitude spread.
    """
    return math.fsum(terms)


def lp_norm(x: TruncatedSequence, p: Exponent) -> float:
    """(sum |x_n|^p)^(1/p); zero for the empty or all-zero sequence."""
    if len(x) == 0:
        return 0.0
    total = compensated_sum([abs(v) ** p.p for v in x.values])
    return total ** (1.0 / p.p)


def l1_norm(x: TruncatedSequence) -> float:
    return compensated_sum([abs(v) for v in x.values])
