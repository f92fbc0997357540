"""Upper-triangular Toeplitz operators, the geometric-weight (q-Hardy)
instance, finite sections, and the classical averaging operator benchmark.

A kernel is either an explicit finite coefficient list (a_1, ..., a_M with an
implicit zero tail) or a geometric descriptor a_m = scale * ratio^(m-1). The
geometric form carries its coefficient sum S = scale/(1-ratio) in closed form
because the certification layer needs S to machine precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import QParam, TruncatedSequence, compensated_sum


@dataclass(frozen=True)
class ToeplitzKernel:
    """Generating coefficients of an upper-triangular Toeplitz operator.

    Exactly one of ``coeffs`` (explicit mode) or ``ratio``/``scale``
    (geometric mode) is set. Requires a_1 > 0 and all a_m >= 0.
    """

    coeffs: tuple[float, ...] | None = None
    ratio: float | None = None
    scale: float | None = None

    def __post_init__(self) -> None:
        if (self.coeffs is None) == (self.ratio is None):
            raise ValueError("kernel is either explicit (coeffs) or geometric (ratio, scale)")
        if self.coeffs is not None:
            if len(self.coeffs) == 0 or self.coeffs[0] <= 0.0:
                raise ValueError("kernel needs a_1 > 0")
            if any(a < 0.0 for a in self.coeffs):
                raise ValueError("kernel coefficients must be nonnegative")
        else:
            if not (0.0 < self.ratio < 1.0):
                raise ValueError(f"geometric ratio must lie in (0, 1), got {self.ratio}")
            if self.scale is None or self.scale <= 0.0:
                raise ValueError(f"geometric scale must be positive, got {self.scale}")

    @classmethod
    def explicit(cls, coeffs) -> "ToeplitzKernel":
        return cls(coeffs=tuple(float(a) for a in coeffs))

    @classmethod
    def geometric(cls, ratio: float, scale: float = 1.0) -> "ToeplitzKernel":
        return cls(ratio=float(ratio), scale=float(scale))

    @property
    def is_geometric(self) -> bool:
        return self.ratio is not None

    @property
    def S(self) -> float:
        """Coefficient sum; exact closed form scale/(1-ratio) in geometric mode."""
        if self.is_geometric:
            return self.scale / (1.0 - self.ratio)
        return compensated_sum(self.coeffs)

    def coefficient(self, m: int) -> float:
        """a_m, 1-indexed; zero beyond an explicit kernel's support."""
        if m < 1:
            raise IndexError(f"kernel index starts at 1, got {m}")
        if self.is_geometric:
            return self.scale * self.ratio ** (m - 1)
        return self.coeffs[m - 1] if m <= len(self.coeffs) else 0.0

    def prefix_sum(self, m: int) -> float:
        """P_m = a_1 + ... + a_m, closed form in geometric mode."""
        if self.is_geometric:
            return self.scale * (1.0 - self.ratio ** m) / (1.0 - self.ratio)
        return compensated_sum(self.coeffs[: min(m, len(self.coeffs))])

    def to_json(self) -> dict[str, Any]:
        if self.is_geometric:
            return {"type": "geometric", "ratio": self.ratio, "scale": self.scale}
        return {"type": "explicit", "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj: dict[str, Any] | str) -> "ToeplitzKernel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj.get("type")
        if kind == "geometric":
            return cls.geometric(obj["ratio"], obj.get("scale", 1.0))
        if kind == "explicit":
            return cls.explicit(obj["coeffs"])
        raise ValueError(f"unknown kernel type {kind!r}")


@dataclass(frozen=True)
class TruncatedMatrix:
    """A finite N x N section with nonnegative entries."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ValueError(f"entries must be square and nonempty, got shape {e.shape}")
        if np.any(e < 0.0):
            raise ValueError("entries must be nonnegative")
        object.__setattr__(self, "entries", e)

    @property
    def N(self) -> int:
        return self.entries.shape[0]


def q_hardy_kernel(q: QParam) -> ToeplitzKernel:
    """The geometric-weight operator kernel a_m = q^(m-1), so that
    (Ax)_n = q^(-n) sum_{k>=n} q^k x_k. Its coefficient sum is 1/(1-q)."""
    return ToeplitzKernel.geometric(ratio=q.q, scale=1.0)


def apply_toeplitz(k: ToeplitzKernel, x: TruncatedSequence) -> TruncatedSequence:
    """y_i = sum_{j>=i} a_{j-i+1} x_j; support of y within support of x.

    Geometric kernels use the backward recursion y_i = s*x_i + r*y_{i+1}
    (O(L)); explicit kernels convolve directly with compensated row sums.
    """
    L = len(x)
    if L == 0:
        return TruncatedSequence(())
    if k.is_geometric:
        out = [0.0] * L
        acc = 0.0
        for i in range(L - 1, -1, -1):
            acc = x.values[i] + k.ratio * acc
            out[i] = k.scale * acc
        return TruncatedSequence.of(out)
    M = len(k.coeffs)
    out = []
    for i in range(1, L + 1):
        terms = [k.coeffs[m - 1] * x.values[i + m - 2] for m in range(1, min(M, L - i + 1) + 1)]
        out.append(compensated_sum(terms))
    return TruncatedSequence.of(out)


def apply_qhardy_direct(q: QParam, x: TruncatedSequence) -> TruncatedSequence:
    """y_n = q^(-n) sum_{k>=n} q^k x_k, evaluated as sum_k q^(k-n) x_k so no
    large power is ever formed. Row sums are independent of
    :func:`apply_toeplitz` (direct dot products, not the recursion)."""
    x.require_nonnegative("input sequence")
    L = len(x)
    if L == 0:
        return TruncatedSequence(())
    xv = np.asarray(x.values)
    powers = q.q ** np.arange(L)
    out = [float(powers[: L - n] @ xv[n:]) for n in range(L)]
    return TruncatedSequence.of(out)


def apply_cesaro(x: TruncatedSequence, horizon: int) -> TruncatedSequence:
    """Running averages y_n = (1/n) sum_{k<=n} x_k for n = 1..horizon.

    The image of a finitely supported sequence has infinite support, so the
    horizon is mandatory; entries past it are silently infinite-tail and the
    caller owns that truncation.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon}")
    out = []
    acc = 0.0
    comp = 0.0
    for n in range(1, horizon + 1):
        v = x.at(n)
        # Neumaier-compensated running prefix sum.
        t = acc + v
        if abs(acc) >= abs(v):
            comp += (acc - t) + v
        else:
            comp += (v - t) + acc
        acc = t
        out.append((acc + comp) / n)
    return TruncatedSequence.of(out)


def cesaro_section(N: int) -> TruncatedMatrix:
    """The N x N section of the averaging operator, entries 1/i for j <= i."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    rows = np.tril(np.ones((N, N))) / np.arange(1, N + 1)[:, None]
    return TruncatedMatrix(rows)


def materialize(k: ToeplitzKernel, N: int) -> TruncatedMatrix:
    """The N x N finite section, entries[i][j] = a_{j-i+1} for j >= i."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    first_row = np.array([k.coefficient(m) for m in range(1, N + 1)])
    e = np.zeros((N, N))
    for i in range(N):
        e[i, i:] = first_row[: N - i]
    return TruncatedMatrix(e)
