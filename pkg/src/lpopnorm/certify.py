"""Two-sided l^p operator-norm certification.

Upper bounds come from a weighted Schur test; for upper-triangular Toeplitz
kernels with the constant-one weight the bound collapses to the coefficient
sum S in closed form, with no truncation at all. Lower bounds come from two
independent witnesses: the indicator sequence of {1..M} (whose Rayleigh ratio
has a closed form and climbs monotonically to S) and a nonlinear power
iteration on a finite section. A certificate pairs the best lower bound with
the exact upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import Exponent, QParam, ToleranceConfig, TruncatedSequence, compensated_sum, lp_norm
from .operators import ToeplitzKernel, TruncatedMatrix, apply_qhardy_direct, apply_toeplitz


@dataclass(frozen=True)
class SchurWeights:
    """Positive weights b_{i,j} for the Schur test.

    ``b = None`` is the symbolic constant-one weight, which needs no
    truncation and keeps the bound exact.
    """

    b: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.b is not None:
            arr = np.asarray(self.b, dtype=float)
            if np.any(arr <= 0.0):
                raise ValueError("Schur weights must be strictly positive")
            object.__setattr__(self, "b", arr)

    @classmethod
    def ones(cls) -> "SchurWeights":
        return cls(None)

    @classmethod
    def from_array(cls, b) -> "SchurWeights":
        return cls(np.asarray(b, dtype=float))


def schur_bound(
    m: TruncatedMatrix, w: SchurWeights, p: Exponent
) -> tuple[float, float, float]:
    """Weighted Schur-test upper bound on the l^p norm of a finite section.

    U1 = max row sum of m_ij * b_ij^{1/p}, U2 = max column sum of
    m_ij * b_ij^{-1/conj}; the bound U1^{1/conj} * U2^{1/p} dominates the
    true norm for any positive weight matrix.
    """
    e = m.entries
    if w.b is None:
        weighted_rows = e
        weighted_cols = e
    else:
        if w.b.shape != e.shape:
            raise ValueError(
                f"weight shape {w.b.shape} does not match matrix shape {e.shape}"
            )
        weighted_rows = e * w.b ** (1.0 / p.p)
        weighted_cols = e * w.b ** (-1.0 / p.conj)
    U1 = float(weighted_rows.sum(axis=1).max())
    U2 = float(weighted_cols.sum(axis=0).max())
    bound = U1 ** (1.0 / p.conj) * U2 ** (1.0 / p.p)
    return bound, U1, U2


def toeplitz_schur_bound(k: ToeplitzKernel, p: Exponent) -> float:
    """Certified upper bound on the full (untruncated) operator norm.

    With the constant-one weight, every row sum of the infinite Toeplitz
    matrix is at most S and equals S in the limit, and every column sum is
    at most S, so the Schur bound is S^{1/conj} * S^{1/p} = S exactly.
    """
    return k.S


def _indicator_ratio(k: ToeplitzKernel, p: Exponent, M: int) -> float:
    """Closed-form Rayleigh ratio of the indicator of {1..M}:
    ratio^p = (1/M) * sum_{m=1}^{M} P_m^p with P_m the kernel prefix sums."""
    if k.is_geometric:
        m = np.arange(1, M + 1)
        P = k.scale * (1.0 - k.ratio ** m) / (1.0 - k.ratio)
        total = float(np.sum(P ** p.p))
    else:
        L = len(k.coeffs)
        head = min(M, L)
        prefixes = np.cumsum(k.coeffs)[:head]
        total = float(np.sum(prefixes ** p.p))
        if M > L:
            total += (M - L) * k.S ** p.p
    return (total / M) ** (1.0 / p.p)


def indicator_witness(
    k: ToeplitzKernel, p: Exponent, M: int
) -> tuple[float, TruncatedSequence]:
    """Lower-bound witness: the indicator sequence of {1..M}.

    Row i of the image is the prefix sum P_{M-i+1}, so the ratio has the
    closed form above; it is nondecreasing in M and converges to S.
    """
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    witness = TruncatedSequence.of([1.0] * M)
    return _indicator_ratio(k, p, M), witness


def best_possibility_search(
    k: ToeplitzKernel, p: Exponent, eps: float, m_cap: int = 10**7
) -> tuple[int, float]:
    """Double M until the indicator ratio exceeds S - eps.

    Raises RuntimeError if no M up to m_cap suffices (cannot happen for a
    true epsilon > 0, but the cap keeps the search total).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    target = k.S - eps
    M = 1
    while True:
        ratio = _indicator_ratio(k, p, M)
        if ratio > target:
            return M, ratio
        if M >= m_cap:
            raise RuntimeError(
                f"indicator ratio reached only {ratio} < S - eps = {target} at M = {M}"
            )
        M *= 2


def _dual_map(y: np.ndarray, p: float) -> np.ndarray:
    return np.sign(y) * np.abs(y) ** (p - 1.0)


def _vec_lp(y: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(y) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    witness: TruncatedSequence
    iterations: int
    ratios: tuple[float, ...]


def power_iteration_lower_bound(
    m: TruncatedMatrix, p: Exponent, cfg: ToleranceConfig = ToleranceConfig()
) -> PowerIterationResult:
    """Nonlinear power iteration for the l^p -> l^p norm of a section.

    Iterates x -> normalize(dual_conj(m^T dual_p(m x))) from the all-ones
    vector. Every Rayleigh ratio |m x|_p / |x|_p along the way is a valid
    lower bound, and for nonnegative matrices the ratios ascend
    monotonically, so the final one is returned with its witness.
    """
    A = m.entries
    if not np.any(A > 0.0):
        raise ValueError("zero matrix has no norm witness")
    x = np.ones(m.N)
    x /= _vec_lp(x, p.p)
    ratios: list[float] = []
    best = x
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        y = A @ x
        ratio = _vec_lp(y, p.p)
        ratios.append(ratio)
        best = x
        if len(ratios) > 1 and abs(ratio - ratios[-2]) <= cfg.rel_tol * max(abs(ratio), 1.0):
            break
        z = A.T @ _dual_map(y, p.p)
        x_next = _dual_map(z, p.conj)
        norm = _vec_lp(x_next, p.p)
        if norm == 0.0:
            break
        x = x_next / norm
    return PowerIterationResult(
        value=ratios[-1],
        witness=TruncatedSequence.of(best),
        iterations=iterations,
        ratios=tuple(ratios),
    )


@dataclass(frozen=True)
class NormCertificate:
    """A certified two-sided bound lower <= |A|_{p,p} <= upper with the
    witness that attains the lower bound."""

    upper: float
    lower: float
    p: Exponent
    witness: TruncatedSequence
    method_upper: str
    method_lower: str
    N: int
    iterations: int
    residuals: tuple[float, ...] = field(default_factory=tuple)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": "1",
            "upper": self.upper,
            "lower": self.lower,
            "gap": self.gap,
            "p": self.p.p,
            "witness": list(self.witness.values),
            "method_upper": self.method_upper,
            "method_lower": self.method_lower,
            "N": self.N,
            "iterations": self.iterations,
            "residuals": list(self.residuals),
        }


def _validate_certificate(cert: NormCertificate, k: ToeplitzKernel) -> None:
    if not (0.0 <= cert.lower <= cert.upper * (1.0 + 1e-10)):
        raise RuntimeError(
            f"certificate bounds inconsistent: lower={cert.lower}, upper={cert.upper}"
        )
    if cert.witness.is_zero():
        raise RuntimeError("certificate witness is zero")
    # The witness must actually reproduce the claimed lower bound.
    num = lp_norm(apply_toeplitz(k, cert.witness), cert.p)
    den = lp_norm(cert.witness, cert.p)
    if abs(num / den - cert.lower) > 1e-10 * max(cert.lower, 1.0):
        raise RuntimeError(
            f"witness ratio {num / den} does not reproduce lower bound {cert.lower}"
        )


def certify_norm(
    k: ToeplitzKernel,
    p: Exponent,
    N: int,
    cfg: ToleranceConfig = ToleranceConfig(),
) -> NormCertificate:
    """Assemble a two-sided certificate at truncation N.

    The upper bound is the closed-form Schur value S (exact, untruncated);
    the lower bound is the better of the indicator witness at M = N and the
    power iteration on the N x N section.
    """
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    from .operators import materialize

    upper = toeplitz_schur_bound(k, p)
    ind_ratio, ind_witness = indicator_witness(k, p, N)
    power = power_iteration_lower_bound(materialize(k, N), p, cfg)
    if power.value > ind_ratio:
        lower, witness, method = power.value, power.witness, "power-iteration"
    else:
        lower, witness, method = ind_ratio, ind_witness, "indicator"
    residuals = tuple(
        abs(b - a) / max(abs(b), 1.0) for a, b in zip(power.ratios, power.ratios[1:])
    )
    cert = NormCertificate(
        upper=upper,
        lower=lower,
        p=p,
        witness=witness,
        method_upper="schur-closed-form",
        method_lower=method,
        N=N,
        iterations=power.iterations,
        residuals=residuals,
    )
    _validate_certificate(cert, k)
    return cert


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    holds: bool
    margin: float

    def to_json(self) -> dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "margin": self.margin}


def verify_discrete_inequality(
    q: QParam,
    p: Exponent,
    x: TruncatedSequence,
    cfg: ToleranceConfig = ToleranceConfig(),
) -> InequalityReport:
    """Check the geometric-weight Hardy inequality on a concrete sequence:
    sum_n (q^{-n} sum_{k>=n} q^k x_k)^p <= (1-q)^{-p} sum_n x_n^p.

    Rows past the support vanish for finitely supported x, so the left side
    is a finite sum with no truncation error.
    """
    x.require_nonnegative("inequality input")
    y = apply_qhardy_direct(q, x)
    lhs = compensated_sum([v ** p.p for v in y.values])
    rhs = (1.0 - q.q) ** (-p.p) * compensated_sum([v ** p.p for v in x.values])
    margin = rhs - lhs
    return InequalityReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + cfg.abs_tol, margin=margin)
