"""q-calculus primitives: q-brackets, Jackson quadrature on geometric grids,
and the weighted Hardy q-integral inequality with its discrete reduction.

A function f on [0, base) is represented only by its samples on the geometric
grid {q^k * base, k = 0..K}; that keeps every operation closed under
serialization. Analytic functions are sampled by callers (see
:meth:`GridFunction.from_function`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .core import Exponent, QParam, TruncatedSequence, compensated_sum

TailMode = Literal["zero", "geometric"]


def q_bracket(alpha: float, q: QParam) -> float:
    """The q-analogue (1 - q^alpha) / (1 - q) of the number alpha."""
    return (1.0 - q.q ** alpha) / (1.0 - q.q)


@dataclass(frozen=True)
class GridFunction:
    """Samples f(q^k * base) for k = 0..K on a geometric grid.

    tail_mode says how the unsampled tail (k > K) behaves: "zero" truncates
    exactly; "geometric" extrapolates with the ratio of the last two samples,
    which must have magnitude < 1.
    """

    base: float
    q: QParam
    samples: tuple[float, ...]
    tail_mode: TailMode = "zero"

    def __post_init__(self) -> None:
        if self.base <= 0:
            raise ValueError(f"base must be positive, got {self.base}")
        if len(self.samples) == 0:
            raise ValueError("need at least one sample (k = 0)")
        if any(not math.isfinite(s) for s in self.samples):
            raise ValueError("samples must be finite")
        if self.tail_mode == "geometric":
            r = self.tail_ratio()
            if not abs(r) < 1.0:
                raise ValueError(
                    f"geometric tail needs |ratio| < 1, last two samples give {r}"
                )

    @classmethod
    def from_function(
        cls,
        f: Callable[[float], float],
        base: float,
        q: QParam,
        K: int | None = None,
        tail_mode: TailMode = "zero",
        tail_threshold: float = 1e-16,
    ) -> "GridFunction":
        """Sample an analytic f; K defaults to the smallest truncation whose
        grid weight q^K falls below tail_threshold relative to max|f|."""
        if K is None:
            probe = [abs(f(q.q ** k * base)) for k in range(64)]
            K = default_truncation(q, max(probe) or 1.0, tail_threshold)
        samples = tuple(float(f(q.q ** k * base)) for k in range(K + 1))
        return cls(base=base, q=q, samples=samples, tail_mode=tail_mode)

    def tail_ratio(self) -> float:
        if len(self.samples) < 2 or self.samples[-2] == 0.0:
            return 0.0
        return self.samples[-1] / self.samples[-2]


def default_truncation(q: QParam, max_abs: float, tail_threshold: float = 1e-16) -> int:
    """Smallest K with q^K * max_abs < tail_threshold (at least 1)."""
    if max_abs <= 0:
        return 1
    k = math.ceil(math.log(tail_threshold / max_abs) / math.log(q.q))
    return max(1, k)


def jackson_integral(f: GridFunction, K: int) -> tuple[float, float]:
    """Truncated geometric-grid quadrature of f over [0, base].

    Returns (value, tail_residual) where value = (1-q) * base *
    sum_{k=0}^{K} q^k f(q^k base) and tail_residual bounds the omitted
    k > K tail under the grid's tail_mode.
    """
    q = f.q.q
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K > len(f.samples) - 1:
        raise ValueError(
            f"K={K} exceeds available samples ({len(f.samples)} given)"
        )
    value = (1.0 - q) * f.base * compensated_sum(
        [q ** k * f.samples[k] for k in range(K + 1)]
    )
    if f.tail_mode == "zero":
        residual = 0.0
    else:
        # Terms past K continue with per-step factor q * tail_ratio; bound
        # the omitted geometric series from its first term.
        r = abs(f.tail_ratio())
        first = (1.0 - q) * f.base * q ** (K + 1) * abs(f.samples[K]) * r
        residual = first / (1.0 - q * r)
    return value, residual


@dataclass(frozen=True)
class HardyParams:
    """Admissible (p, alpha, q) for the weighted Hardy q-integral inequality;
    requires alpha < 1 - 1/p strictly."""

    p: Exponent
    alpha: float
    q: QParam

    def __post_init__(self) -> None:
        if not self.alpha < 1.0 - 1.0 / self.p.p:
            raise ValueError(
                f"alpha must satisfy alpha < 1 - 1/p, got alpha={self.alpha}, p={self.p.p}"
            )

    @property
    def bracket(self) -> float:
        """[1 - 1/p - alpha]_q, the sharp constant's q-bracket."""
        return q_bracket(1.0 - 1.0 / self.p.p - self.alpha, self.q)

    @property
    def effective_ratio(self) -> float:
        """q^(1 - 1/p - alpha), the ratio of the reduced discrete operator."""
        return self.q.q ** (1.0 - 1.0 / self.p.p - self.alpha)


def hardy_integral_sides(
    f: GridFunction, params: HardyParams, K: int
) -> tuple[float, float]:
    """Both sides of the weighted Hardy q-integral inequality on [0, 1].

    lhs = integral over [0,1] of x^{p(alpha-1)} (integral over [0,x] of
    t^{-alpha} f dt)^p, rhs = bracket^{-p} * integral of f^p; both evaluated
    by the truncated quadrature with the same K. The grid weights are
    combined per term (q^n * h_n^p with bounded h_n) so no intermediate
    power over- or underflows.
    """
    if f.base != 1.0:
        raise ValueError("the inequality is stated on the unit interval (base = 1)")
    if K > len(f.samples) - 1:
        raise ValueError(f"K={K} exceeds available samples")
    for s in f.samples[: K + 1]:
        if s < 0.0:
            raise ValueError("samples must be nonnegative")
    q = params.q.q
    if f.q.q != q:
        raise ValueError("grid q and parameter q disagree")
    p = params.p.p
    alpha = params.alpha

    # Inner integral at x = q^n factors as q^{n(1-alpha)} * h_n; the outer
    # weight x^{p(alpha-1)} cancels that growth exactly, leaving q^n * h_n^p.
    w = [q ** (k * (1.0 - alpha)) for k in range(K + 1)]
    lhs_terms = []
    for n in range(K + 1):
        h = (1.0 - q) * compensated_sum(
            [w[k] * f.samples[n + k] for k in range(K + 1 - n)]
        )
        lhs_terms.append((1.0 - q) * q ** n * h ** p)
    lhs = compensated_sum(lhs_terms)

    fp = (1.0 - q) * compensated_sum(
        [q ** j * f.samples[j] ** p for j in range(K + 1)]
    )
    rhs = params.bracket ** (-p) * fp
    return lhs, rhs


def reduce_to_discrete(
    f: GridFunction, params: HardyParams
) -> tuple[float, TruncatedSequence]:
    """Map the integral inequality's data to its discrete form.

    Returns (Qeff, c) with Qeff = q^(1 - 1/p - alpha) and c_j = q^{j/p} f(q^j)
    for j = 0..K, reindexed from 1 (the shift is harmless by homogeneity).
    The integral inequality with (f, p, alpha, q) is then exactly the
    discrete geometric-weight inequality with ratio Qeff applied to c; see
    :func:`discrete_form_sides` for the executable identity.
    """
    Qeff = params.effective_ratio
    if Qeff >= 1.0:
        raise RuntimeError(f"effective ratio {Qeff} >= 1 despite admissible params")
    q = params.q.q
    p = params.p.p
    c = TruncatedSequence.of(
        q ** (j / p) * f.samples[j] for j in range(len(f.samples))
    )
    return Qeff, c


def discrete_form_sides(f: GridFunction, params: HardyParams) -> tuple[float, float]:
    """The integral-inequality sides re-evaluated through the discrete form.

    lhs = (1-q)^{p+1} * sum_n (sum_{j>=n} Qeff^{j-n} c_j)^p and
    rhs = (1-q)^{p+1} * (1-Qeff)^{-p} * sum_j c_j^p. Each agrees with the
    corresponding side of :func:`hardy_integral_sides` at the same K to
    1e-10 relative, which is the equivalence of the two inequalities.
    """
    Qeff, c = reduce_to_discrete(f, params)
    q = params.q.q
    p = params.p.p
    K = len(c) - 1

    # Suffix sums sum_{j>=n} Qeff^{j-n} c_j by backward recursion.
    suffix = [0.0] * (K + 1)
    acc = 0.0
    for n in range(K, -1, -1):
        acc = c.values[n] + Qeff * acc
        suffix[n] = acc
    scale = (1.0 - q) ** (p + 1.0)
    lhs = scale * compensated_sum([s ** p for s in suffix])
    rhs = scale * (1.0 - Qeff) ** (-p) * compensated_sum(
        [ci ** p for ci in c.values]
    )
    return lhs, rhs
