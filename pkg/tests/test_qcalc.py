import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lpopnorm.core import Exponent, QParam
from lpopnorm.qcalc import (
    GridFunction,
    HardyParams,
    default_truncation,
    discrete_form_sides,
    hardy_integral_sides,
    jackson_integral,
    q_bracket,
    reduce_to_discrete,
)
from oracles import jackson_series


def monomial_grid(power, q, K, **kw):
    qp = QParam(q)
    return GridFunction(
        base=1.0, q=qp, samples=tuple((qp.q**k) ** power for k in range(K + 1)), **kw
    )


class TestQBracket:
    def test_one(self):
        for q in (0.1, 0.5, 0.9):
            assert q_bracket(1.0, QParam(q)) == pytest.approx(1.0, rel=1e-15)

    def test_zero(self):
        assert q_bracket(0.0, QParam(0.3)) == 0.0

    def test_two_at_half(self):
        # (1 - 0.25) / 0.5 = 1.5 = 1 + q
        assert q_bracket(2.0, QParam(0.5)) == pytest.approx(1.5, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
    def test_classical_limit(self, alpha):
        # [alpha]_q -> alpha as q -> 1; Taylor bound on the deviation.
        val = q_bracket(alpha, QParam(0.999))
        assert abs(val - alpha) < 0.01 * abs(alpha) * abs(alpha - 1.0)


class TestJacksonIntegral:
    def test_constant_function(self):
        f = monomial_grid(0.0, 0.5, 60)
        value, residual = jackson_integral(f, 60)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert residual == 0.0

    def test_linear_function(self):
        f = monomial_grid(1.0, 0.5, 60)
        value, _ = jackson_integral(f, 60)
        assert value == pytest.approx(2.0 / 3.0, abs=1e-12)

    @pytest.mark.parametrize("m", [0, 1, 2, 5])
    @pytest.mark.parametrize("q", [0.25, 0.5, 0.9])
    def test_monomials_against_series_oracle(self, m, q):
        K = default_truncation(QParam(q), 1.0)
        f = monomial_grid(float(m), q, K)
        value, _ = jackson_integral(f, K)
        assert value == pytest.approx(jackson_series(m, q, K), rel=1e-14)
        # And the exact q-analogue of 1/(m+1):
        assert value == pytest.approx(1.0 / q_bracket(m + 1.0, QParam(q)), rel=1e-12)

    def test_insufficient_samples_rejected(self):
        f = monomial_grid(0.0, 0.5, 10)
        with pytest.raises(ValueError):
            jackson_integral(f, 11)

    def test_geometric_tail_bounds_true_remainder(self):
        q = 0.5
        K = 20
        f = monomial_grid(1.0, q, K, tail_mode="geometric")
        value, residual = jackson_integral(f, K)
        exact = 1.0 / q_bracket(2.0, QParam(q))
        assert value <= exact <= value + residual

    def test_zero_tail_mode_reports_zero(self):
        f = monomial_grid(1.0, 0.5, 20)
        assert jackson_integral(f, 20)[1] == 0.0

    def test_positivity(self):
        rng = random.Random(7)
        qp = QParam(0.4)
        f = GridFunction(base=1.0, q=qp, samples=tuple(rng.random() for _ in range(30)))
        assert jackson_integral(f, 29)[0] >= 0.0

    def test_linearity(self):
        rng = random.Random(8)
        qp = QParam(0.6)
        s1 = tuple(rng.random() for _ in range(25))
        s2 = tuple(rng.random() for _ in range(25))
        a, b = 2.5, -1.25
        combo = tuple(a * u + b * v for u, v in zip(s1, s2))
        v1 = jackson_integral(GridFunction(base=1.0, q=qp, samples=s1), 24)[0]
        v2 = jackson_integral(GridFunction(base=1.0, q=qp, samples=s2), 24)[0]
        vc = jackson_integral(GridFunction(base=1.0, q=qp, samples=combo), 24)[0]
        assert vc == pytest.approx(a * v1 + b * v2, rel=1e-12, abs=1e-15)


class TestGridFunction:
    def test_needs_samples(self):
        with pytest.raises(ValueError):
            GridFunction(base=1.0, q=QParam(0.5), samples=())

    def test_geometric_tail_needs_contracting_ratio(self):
        with pytest.raises(ValueError):
            GridFunction(
                base=1.0, q=QParam(0.5), samples=(1.0, 2.0), tail_mode="geometric"
            )

    def test_from_function_default_truncation(self):
        g = GridFunction.from_function(lambda t: t, base=1.0, q=QParam(0.5))
        assert 0.5 ** (len(g.samples) - 1) < 1e-15


class TestHardyParams:
    def test_rejects_alpha_at_threshold(self):
        with pytest.raises(ValueError):
            HardyParams(p=Exponent(2), alpha=0.5, q=QParam(0.5))

    def test_admits_strictly_below(self):
        params = HardyParams(p=Exponent(2), alpha=0.49, q=QParam(0.5))
        assert 0.0 < params.effective_ratio < 1.0


class TestIntegralInequalitySides:
    def test_constant_function_spot_values(self):
        # Inner integral of f = 1 is exactly x, so lhs collapses to 1 while
        # rhs = ((1-q)/(1-sqrt(q)))^(-2)... = bracket^(-2) = 2.25 at q = 1/4.
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(0.25))
        K = default_truncation(QParam(0.25), 1.0)
        f = monomial_grid(0.0, 0.25, K)
        lhs, rhs = hardy_integral_sides(f, params, K)
        assert lhs == pytest.approx(1.0, abs=1e-10)
        assert rhs == pytest.approx(2.25, abs=1e-10)

    def test_zero_function(self):
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(0.5))
        f = GridFunction(base=1.0, q=QParam(0.5), samples=(0.0,) * 30)
        assert hardy_integral_sides(f, params, 29) == (0.0, 0.0)

    def test_linear_function_against_double_sum_oracle(self):
        q, K = 0.5, 60
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(q))
        f = monomial_grid(1.0, q, K)
        lhs, rhs = hardy_integral_sides(f, params, K)
        # Independent oracle: the naive truncated double summation with the
        # weights written out literally (safe here since alpha = 0).
        oracle_lhs = 0.0
        for n in range(K + 1):
            x = q**n
            inner = (1.0 - q) * x * sum(q**k * (q**k * x) for k in range(K + 1 - n))
            oracle_lhs += (1.0 - q) * x * x ** (2 * (0.0 - 1.0)) * inner**2
        assert lhs == pytest.approx(oracle_lhs, rel=1e-12)
        assert lhs < rhs

    def test_rejects_negative_samples(self):
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(0.5))
        f = GridFunction(base=1.0, q=QParam(0.5), samples=(1.0, -0.5))
        with pytest.raises(ValueError):
            hardy_integral_sides(f, params, 1)

    def test_rejects_nonunit_interval(self):
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(0.5))
        f = GridFunction(base=2.0, q=QParam(0.5), samples=(1.0, 1.0))
        with pytest.raises(ValueError):
            hardy_integral_sides(f, params, 1)

    @settings(deadline=None, max_examples=40)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40).filter(
            lambda xs: max(xs) > 1e-3
        ),
        st.sampled_from([1.5, 2.0, 3.0]),
        st.sampled_from([0.0, -1.0]),
        st.sampled_from([0.25, 0.5]),
    )
    def test_strict_inequality_for_nonzero_f(self, samples, p, alpha, q):
        params = HardyParams(p=Exponent(p), alpha=alpha, q=QParam(q))
        f = GridFunction(base=1.0, q=QParam(q), samples=tuple(samples))
        lhs, rhs = hardy_integral_sides(f, params, len(samples) - 1)
        assert lhs <= rhs - max(1e-14, 1e-12 * rhs)


class TestDiscreteReduction:
    def test_effective_ratio(self):
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(0.25))
        assert params.effective_ratio == pytest.approx(0.5, rel=1e-15)

    def test_exponent_one_case(self):
        # alpha = 1 - 1/p - 1 makes the effective ratio equal to q itself.
        p = Exponent(2)
        alpha = 1.0 - 1.0 / p.p - 1.0
        params = HardyParams(p=p, alpha=alpha, q=QParam(0.25))
        assert params.effective_ratio == pytest.approx(0.25, rel=1e-15)
        f = monomial_grid(0.0, 0.25, 10)
        Qeff, c = reduce_to_discrete(f, params)
        assert Qeff == pytest.approx(0.25, rel=1e-15)
        assert c.values[3] == pytest.approx(0.25 ** (3 / 2), rel=1e-14)

    def test_identity_for_constant_function(self):
        q = 0.25
        params = HardyParams(p=Exponent(2), alpha=0.0, q=QParam(q))
        K = default_truncation(QParam(q), 1.0)
        f = monomial_grid(0.0, q, K)
        lhs, rhs = hardy_integral_sides(f, params, K)
        d_lhs, d_rhs = discrete_form_sides(f, params)
        assert d_lhs == pytest.approx(lhs, rel=1e-10)
        assert d_rhs == pytest.approx(rhs, rel=1e-10)

    @settings(deadline=None, max_examples=40)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=5.0), min_size=1, max_size=50).filter(
            lambda xs: max(xs) > 1e-6
        ),
        st.sampled_from([1.5, 2.0, 3.0]),
        st.sampled_from([0.0, -1.0, -0.3]),
        st.sampled_from([0.25, 0.5, 0.9]),
    )
    def test_identity_random(self, samples, p, alpha, q):
        params = HardyParams(p=Exponent(p), alpha=alpha, q=QParam(q))
        f = GridFunction(base=1.0, q=QParam(q), samples=tuple(samples))
        lhs, rhs = hardy_integral_sides(f, params, len(samples) - 1)
        d_lhs, d_rhs = discrete_form_sides(f, params)
        assert d_lhs == pytest.approx(lhs, rel=1e-10, abs=1e-300)
        assert d_rhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)
