"""HTTP service exposing the certification and verification pipelines.

Every endpoint is a stateless POST: the request carries all parameters, the
response is plain JSON, and identical requests (including seeds) produce
identical responses. The CLI is a thin client over these endpoints.
"""

from __future__ import annotations

import logging
import random
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from .core import Exponent, QParam, ToleranceConfig, TruncatedSequence
from .certify import (
    best_possibility_search,
    certify_norm,
    indicator_witness,
    power_iteration_lower_bound,
    verify_discrete_inequality,
)
from .operators import ToeplitzKernel, materialize, q_hardy_kernel
from .qcalc import (
    GridFunction,
    HardyParams,
    default_truncation,
    discrete_form_sides,
    hardy_integral_sides,
    jackson_integral,
    q_bracket,
)

logger = logging.getLogger("lpopnorm")

SCHEMA_VERSION = "1"


class KernelSpec(BaseModel):
    """Wire form of a Toeplitz kernel: geometric {ratio, scale} or explicit
    {coeffs}; mirrors the kernel JSON consumed everywhere else."""

    type: Literal["geometric", "explicit"]
    ratio: float | None = None
    scale: float = 1.0
    coeffs: list[float] | None = None

    @model_validator(mode="after")
    def _check(self) -> "KernelSpec":
        if self.type == "geometric" and self.ratio is None:
            raise ValueError("geometric kernel needs a ratio")
        if self.type == "explicit" and not self.coeffs:
            raise ValueError("explicit kernel needs coeffs")
        return self

    def to_kernel(self) -> ToeplitzKernel:
        if self.type == "geometric":
            return ToeplitzKernel.geometric(self.ratio, self.scale)
        return ToeplitzKernel.explicit(self.coeffs)


class ConstantsRequest(BaseModel):
    p: float = Field(gt=1.0)
    q: float = Field(gt=0.0, lt=1.0)
    alpha: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "ConstantsRequest":
        if not self.alpha < 1.0 - 1.0 / self.p:
            raise ValueError("alpha must satisfy alpha < 1 - 1/p")
        return self


class ConstantsResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    hardy_constant: float
    q_hardy_constant: float
    integral_constant: float
    bracket: float
    coefficient_sum: float


class ToleranceFields(BaseModel):
    rel_tol: float = Field(default=1e-10, gt=0.0)
    abs_tol: float = Field(default=1e-14, gt=0.0)
    max_iter: int = Field(default=1000, ge=1)

    def to_config(self) -> ToleranceConfig:
        return ToleranceConfig(
            rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_iter=self.max_iter
        )


class CertifyRequest(ToleranceFields):
    kernel: KernelSpec
    p: float = Field(gt=1.0)
    n: int = Field(ge=1)


class CertifyResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    valid: bool
    certificate: dict
    error: str | None = None


class SweepRequest(ToleranceFields):
    kernel: KernelSpec
    p: float = Field(gt=1.0)
    n_list: list[int]

    @model_validator(mode="after")
    def _check(self) -> "SweepRequest":
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if any(n < 1 for n in self.n_list):
            raise ValueError("truncation sizes must be positive")
        if any(a >= b for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly ascending")
        return self


class SweepRow(BaseModel):
    N: int
    indicator_lower: float
    power_lower: float
    upper: float
    gap: float


class SweepResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    rows: list[SweepRow]


class VerifyDiscreteRequest(BaseModel):
    p_values: list[float] = [1.5, 2.0, 3.0]
    q_values: list[float] = [0.1, 0.5, 0.9]
    trials: int = Field(ge=1)
    seed: int = 0
    abs_tol: float = Field(default=1e-14, gt=0.0)


class GridPointReport(BaseModel):
    p: float
    q: float
    trials: int
    violations: int
    min_margin: float
    min_relative_margin: float


class VerifyDiscreteResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    ok: bool
    total_trials: int
    total_violations: int
    min_margin: float
    grid: list[GridPointReport]
    violating_inputs: list[dict]


class VerifyIntegralRequest(BaseModel):
    p_values: list[float] = [1.5, 2.0, 3.0]
    q_values: list[float] = [0.25, 0.5, 0.9]
    trials: int = Field(default=3, ge=0, description="random sample functions per grid point")
    seed: int = 0
    abs_tol: float = Field(default=1e-14, gt=0.0)


class IntegralCaseReport(BaseModel):
    p: float
    alpha: float
    q: float
    shape: str
    lhs: float
    rhs: float
    strict: bool
    reduction_rel_err: float


class VerifyIntegralResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    ok: bool
    cases: int
    violations: int
    min_relative_margin: float
    max_reduction_rel_err: float
    failing_cases: list[IntegralCaseReport]


class JacksonRequest(BaseModel):
    q: float = Field(gt=0.0, lt=1.0)
    base: float = Field(default=1.0, gt=0.0)
    power: float | None = Field(default=None, description="integrate f(t) = t^power")
    samples: list[float] | None = None
    K: int | None = Field(default=None, ge=0)
    tail_mode: Literal["zero", "geometric"] = "zero"

    @model_validator(mode="after")
    def _check(self) -> "JacksonRequest":
        if (self.power is None) == (self.samples is None):
            raise ValueError("give exactly one of power or samples")
        return self


class JacksonResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    value: float
    tail_residual: float
    K: int


app = FastAPI(title="lpopnorm", version="0.1.0")


@app.exception_handler(ValueError)
async def _value_error_handler(request, exc: ValueError):
    # Domain violations that slip past the pydantic layer (e.g. a_1 = 0)
    # are client errors, not server faults.
    from fastapi.responses import JSONResponse

    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.post("/constants", response_model=ConstantsResponse)
def constants(req: ConstantsRequest) -> ConstantsResponse:
    qp = QParam(req.q)
    bracket = q_bracket(1.0 - 1.0 / req.p - req.alpha, qp)
    return ConstantsResponse(
        hardy_constant=(req.p / (req.p - 1.0)) ** req.p,
        q_hardy_constant=(1.0 - req.q) ** (-req.p),
        integral_constant=bracket ** (-req.p),
        bracket=bracket,
        coefficient_sum=1.0 / (1.0 - req.q),
    )


@app.post("/certify", response_model=CertifyResponse)
def certify(req: CertifyRequest) -> CertifyResponse:
    kernel = req.kernel.to_kernel()
    p = Exponent(req.p)
    try:
        cert = certify_norm(kernel, p, req.n, req.to_config())
    except RuntimeError as exc:
        logger.warning("certificate failed: %s", exc)
        return CertifyResponse(valid=False, certificate={}, error=str(exc))
    return CertifyResponse(valid=True, certificate=cert.to_json())


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    kernel = req.kernel.to_kernel()
    p = Exponent(req.p)
    cfg = req.to_config()
    upper = kernel.S
    rows = []
    for n in req.n_list:
        ind, _ = indicator_witness(kernel, p, n)
        power = power_iteration_lower_bound(materialize(kernel, n), p, cfg)
        lower = max(ind, power.value)
        rows.append(
            SweepRow(
                N=n,
                indicator_lower=ind,
                power_lower=power.value,
                upper=upper,
                gap=upper - lower,
            )
        )
    return SweepResponse(rows=rows)


def _random_sequence(rng: random.Random, max_support: int = 50) -> TruncatedSequence:
    # Entries uniform on [0,1], support length uniform on [1, max_support];
    # documented so any reported violation is reproducible from the seed.
    length = rng.randint(1, max_support)
    return TruncatedSequence.of(rng.random() for _ in range(length))


@app.post("/verify/discrete", response_model=VerifyDiscreteResponse)
def verify_discrete(req: VerifyDiscreteRequest) -> VerifyDiscreteResponse:
    rng = random.Random(req.seed)
    cfg = ToleranceConfig(abs_tol=req.abs_tol)
    grid = []
    violating: list[dict] = []
    overall_min = float("inf")
    total_violations = 0
    for p_val in req.p_values:
        p = Exponent(p_val)
        for q_val in req.q_values:
            qp = QParam(q_val)
            violations = 0
            min_margin = float("inf")
            min_rel = float("inf")
            for _ in range(req.trials):
                x = _random_sequence(rng)
                report = verify_discrete_inequality(qp, p, x, cfg)
                min_margin = min(min_margin, report.margin)
                if report.rhs > 0:
                    min_rel = min(min_rel, report.margin / report.rhs)
                if not report.holds:
                    violations += 1
                    violating.append(
                        {"p": p_val, "q": q_val, "x": list(x.values), **report.to_json()}
                    )
            total_violations += violations
            overall_min = min(overall_min, min_margin)
            grid.append(
                GridPointReport(
                    p=p_val,
                    q=q_val,
                    trials=req.trials,
                    violations=violations,
                    min_margin=min_margin,
                    min_relative_margin=min_rel,
                )
            )
    return VerifyDiscreteResponse(
        ok=total_violations == 0,
        total_trials=req.trials * len(req.p_values) * len(req.q_values),
        total_violations=total_violations,
        min_margin=overall_min,
        grid=grid,
        violating_inputs=violating,
    )


def _monomial_grid(power: float, q: QParam, K: int) -> GridFunction:
    samples = tuple((q.q ** k) ** power for k in range(K + 1))
    return GridFunction(base=1.0, q=q, samples=samples)


@app.post("/verify/theorem1", response_model=VerifyIntegralResponse)
def verify_integral(req: VerifyIntegralRequest) -> VerifyIntegralResponse:
    rng = random.Random(req.seed)
    cases = 0
    violations = 0
    min_rel_margin = float("inf")
    max_red_err = 0.0
    failing: list[IntegralCaseReport] = []
    for p_val in req.p_values:
        p = Exponent(p_val)
        alphas = [0.0, -1.0, 1.0 - 1.0 / p_val - 0.1]
        for q_val in req.q_values:
            qp = QParam(q_val)
            K = default_truncation(qp, 1.0)
            shapes: list[tuple[str, GridFunction]] = [
                ("one", _monomial_grid(0.0, qp, K)),
                ("t", _monomial_grid(1.0, qp, K)),
                ("t^2", _monomial_grid(2.0, qp, K)),
            ]
            for i in range(req.trials):
                samples = tuple(rng.random() for _ in range(K + 1))
                shapes.append((f"random-{i}", GridFunction(base=1.0, q=qp, samples=samples)))
            for alpha in alphas:
                params = HardyParams(p=p, alpha=alpha, q=qp)
                for name, f in shapes:
                    lhs, rhs = hardy_integral_sides(f, params, K)
                    d_lhs, d_rhs = discrete_form_sides(f, params)
                    red_err = max(
                        abs(d_lhs - lhs) / max(abs(lhs), 1e-300),
                        abs(d_rhs - rhs) / max(abs(rhs), 1e-300),
                    )
                    max_red_err = max(max_red_err, red_err)
                    strict = lhs <= rhs - max(req.abs_tol, 1e-12 * rhs)
                    cases += 1
                    if rhs > 0:
                        min_rel_margin = min(min_rel_margin, (rhs - lhs) / rhs)
                    if not strict:
                        violations += 1
                        failing.append(
                            IntegralCaseReport(
                                p=p_val, alpha=alpha, q=q_val, shape=name,
                                lhs=lhs, rhs=rhs, strict=strict, reduction_rel_err=red_err,
                            )
                        )
    return VerifyIntegralResponse(
        ok=violations == 0,
        cases=cases,
        violations=violations,
        min_relative_margin=min_rel_margin,
        max_reduction_rel_err=max_red_err,
        failing_cases=failing,
    )


@app.post("/jackson", response_model=JacksonResponse)
def jackson(req: JacksonRequest) -> JacksonResponse:
    qp = QParam(req.q)
    if req.power is not None:
        K = req.K if req.K is not None else default_truncation(qp, req.base ** req.power)
        samples = tuple((qp.q ** k * req.base) ** req.power for k in range(K + 1))
        grid = GridFunction(base=req.base, q=qp, samples=samples, tail_mode=req.tail_mode)
    else:
        grid = GridFunction(
            base=req.base, q=qp, samples=tuple(req.samples), tail_mode=req.tail_mode
        )
        K = req.K if req.K is not None else len(grid.samples) - 1
    try:
        value, residual = jackson_integral(grid, K)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return JacksonResponse(value=value, tail_residual=residual, K=K)


class SearchRequest(BaseModel):
    kernel: KernelSpec
    p: float = Field(gt=1.0)
    eps: float = Field(gt=0.0)
    m_cap: int = Field(default=10**7, ge=1)


class SearchResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    ok: bool
    M: int | None = None
    ratio: float | None = None
    error: str | None = None


@app.post("/witness-search", response_model=SearchResponse)
def witness_search(req: SearchRequest) -> SearchResponse:
    kernel = req.kernel.to_kernel()
    try:
        M, ratio = best_possibility_search(kernel, Exponent(req.p), req.eps, req.m_cap)
    except RuntimeError as exc:
        return SearchResponse(ok=False, error=str(exc))
    return SearchResponse(ok=True, M=M, ratio=ratio)
