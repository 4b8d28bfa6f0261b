import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlfkpp.bounds import (
    BoundInputs,
    IterationOverflowError,
    IterationProblem,
    check_iteration_bound,
    critical_alpha,
    integrate_chain,
    iteration_bound,
    iteration_bound_log2,
    mu_star,
    sobolev_index,
    sup_bound,
    sup_bound_at_index,
)


class TestCriticalAlpha:
    def test_dim_one(self):
        assert critical_alpha(1, 1.0) == 2.0

    def test_dim_three(self):
        assert critical_alpha(3, 1.0) == pytest.approx(5.0 / 3.0, rel=1e-15)

    def test_dim_two_small_beta(self):
        assert critical_alpha(2, 0.1) == pytest.approx(1.1, rel=1e-15)

    @given(beta=st.floats(0.01, 10.0), d1=st.integers(1, 8), d2=st.integers(1, 8))
    def test_nonincreasing_in_dim(self, beta, d1, d2):
        lo, hi = sorted((d1, d2))
        assert critical_alpha(lo, beta) >= critical_alpha(hi, beta)

    @given(dim=st.integers(1, 8), b1=st.floats(0.01, 10.0), b2=st.floats(0.01, 10.0))
    def test_strictly_increasing_in_beta(self, dim, b1, b2):
        if b1 == b2:
            return
        lo, hi = sorted((b1, b2))
        assert critical_alpha(dim, lo) < critical_alpha(dim, hi)


def _inputs(**kw):
    base = dict(dim=1, alpha=1.0, beta=1.0, kappa=1.0, floor_radius=0.5,
                floor_value=0.49, margin=2.0, u0_sup=1.0, sobolev_const=1.0)
    base.update(kw)
    return BoundInputs(**base)


class TestSupBound:
    def test_sobolev_index_dim_three(self):
        assert sobolev_index(3) == 6.0

    def test_sobolev_index_infinite_low_dim(self):
        assert math.isinf(sobolev_index(1))
        assert math.isinf(sobolev_index(2))

    def test_worked_example_dim_one(self):
        # limit formulas: exponent = 1/(beta+1-alpha) = 1,
        # A = 4 * 4*sqrt(2) * max(1, 0.5) / (0.5 * 0.49), M = 2 * A
        rep = sup_bound(_inputs())
        a_expected = 4.0 * 4.0 * math.sqrt(2.0) / (0.5 * 0.49)
        assert rep.exponent == pytest.approx(1.0, rel=1e-15)
        assert rep.prefactor == pytest.approx(a_expected, rel=1e-14)
        assert rep.prefactor == pytest.approx(92.35680407334499, rel=1e-12)
        assert rep.sup_bound == pytest.approx(184.71360814668998, rel=1e-12)
        assert math.isinf(rep.s_star)
        assert rep.alpha_star == 2.0

    def test_max_collapses_to_margin(self):
        # prefactor/kappa <= 1 and u0_sup <= 1 leave only the margin factor
        inp = _inputs(kappa=1000.0, floor_radius=1.0, floor_value=0.3,
                      u0_sup=0.5, margin=1.5)
        rep = sup_bound(inp)
        assert rep.prefactor / inp.kappa < 1.0
        assert rep.sup_bound == pytest.approx(1.5, rel=1e-15)

    def test_dim_three_finite_index(self):
        rep = sup_bound(_inputs(dim=3, alpha=1.0, beta=1.0))
        assert rep.s_star == 6.0
        assert rep.alpha_star == pytest.approx(5.0 / 3.0)
        # exponent (s-2)/(s(beta+1-alpha)-2beta) = 4/(6-2) = 1
        assert rep.exponent == pytest.approx(1.0)

    def test_limit_consistency_large_index(self):
        # dim 1/2 limit expressions agree with the finite-s formula at s = 1e6
        for dim in (1, 2):
            for alpha, beta in ((1.0, 1.0), (1.3, 0.8), (1.0, 0.2)):
                inp = _inputs(dim=dim, alpha=alpha, beta=beta, u0_sup=0.7)
                limit = sup_bound(inp).sup_bound
                finite = sup_bound_at_index(inp, 1e6)
                assert abs(finite - limit) <= 1e-3 * limit

    def test_rejects_alpha_at_or_above_star(self):
        with pytest.raises(ValueError, match="regime"):
            _inputs(alpha=2.0)

    def test_rejects_margin_not_above_one(self):
        with pytest.raises(ValueError, match="margin"):
            _inputs(margin=1.0)

    def test_bound_at_least_margin_times_u0(self):
        rep = sup_bound(_inputs(u0_sup=7.0))
        assert rep.sup_bound >= 2.0 * 7.0

    @given(
        u1=st.floats(0.0, 50.0), u2=st.floats(0.0, 50.0),
        k1=st.floats(1.01, 10.0), k2=st.floats(1.01, 10.0),
        kap1=st.floats(0.01, 100.0), kap2=st.floats(0.01, 100.0),
        alpha=st.floats(1.0, 1.79), beta=st.floats(0.8, 4.0),
    )
    @settings(max_examples=300)
    def test_monotonicity(self, u1, u2, k1, k2, kap1, kap2, alpha, beta):
        base = dict(dim=1, alpha=alpha, beta=beta, floor_radius=0.5,
                    floor_value=0.49, sobolev_const=1.0)
        # nondecreasing in u0_sup and margin, nonincreasing in kappa
        lo_u, hi_u = sorted((u1, u2))
        lo_k, hi_k = sorted((k1, k2))
        lo_kap, hi_kap = sorted((kap1, kap2))
        b = lambda **kw: sup_bound(BoundInputs(**base, **kw)).sup_bound
        common = dict(kappa=1.0, margin=2.0)
        assert b(u0_sup=lo_u, **common) <= b(u0_sup=hi_u, **common)
        assert b(kappa=1.0, margin=lo_k, u0_sup=1.0) \
            <= b(kappa=1.0, margin=hi_k, u0_sup=1.0)
        assert b(kappa=lo_kap, margin=2.0, u0_sup=1.0) \
            >= b(kappa=hi_kap, margin=2.0, u0_sup=1.0)

    def test_mu_star_reported_only_with_anchor(self):
        inp = _inputs(alpha=1.5)
        assert sup_bound(inp).mu_star is None
        rep = sup_bound(inp, anchor_level=3)
        assert rep.mu_star is not None and rep.mu_star > 0.0
        # deeper anchors shrink the admissible mu range
        assert sup_bound(inp, anchor_level=5).mu_star < rep.mu_star

    def test_mu_star_matches_hand_formula_dim_one(self):
        # s = inf: S = sqrt(2) max{w^-1/2, w^1/2 G}, w = floor_radius,
        # P = delta = floor_radius/2, C1 = 2S(1+2P), h = 2(alpha-1)
        inp = _inputs(alpha=1.5)
        delta = inp.floor_radius / 2.0
        w = 2.0 * delta
        s_emb = math.sqrt(2.0) * max(w ** -0.5, w ** 0.5)
        c1 = 2.0 * s_emb * (1.0 + 2.0 * delta)
        h = 1.0
        m = 2
        expected = 1.0 / (2.0 * c1 ** 2 * (2.0 ** (m - 1) + h) ** 2)
        assert mu_star(inp, m) == pytest.approx(expected, rel=1e-14)


def _problem(**kw):
    base = dict(rates=tuple(float(k + 1) for k in range(12)), a_bar=1.0,
                growth_rate=1.0, init_root=1.0, anchor_level=1, anchor_sup=1.0)
    base.update(kw)
    return IterationProblem(**base)


class TestIterationBound:
    def test_collapse_to_one(self):
        # a_bar = 1/2 makes 2*a_bar = 1; tiny growth rate, K <= 1, sup 1.
        # (Formula evaluation only: the domination hypothesis A_k >= 1 is
        # checked separately by the oracle path.)
        p = _problem(a_bar=0.5, growth_rate=1e-12, init_root=1.0, anchor_sup=1.0,
                     anchor_level=1)
        assert iteration_bound(p, 1) == pytest.approx(1.0, rel=1e-9)

    def test_two_level_hand_expansion(self):
        # k = m+1: (2 a_bar)^3 * 2^(D(3m+1)) * max{sup^4, K^(2^(m+1)), 1}
        for m, a_bar, d, k_root, sup in [(1, 1.5, 0.7, 1.2, 1.1),
                                         (2, 0.9, 1.3, 0.8, 2.0),
                                         (3, 2.0, 0.4, 1.1, 0.0)]:
            p = _problem(a_bar=a_bar, growth_rate=d, init_root=k_root,
                         anchor_sup=sup, anchor_level=m)
            expected = (2.0 * a_bar) ** 3 * 2.0 ** (d * (3 * m + 1)) * max(
                sup ** 4, k_root ** (2 ** (m + 1)), 1.0)
            assert iteration_bound(p, m + 1) == pytest.approx(expected, rel=1e-12)

    def test_anchor_level_closed_form(self):
        # k = m: exponent sum has the single term m, bound = 2 A_m * max{...}
        p = _problem(a_bar=1.2, growth_rate=0.5, init_root=1.1, anchor_sup=1.7,
                     anchor_level=2)
        expected = 2.0 * 1.2 * 2.0 ** (0.5 * 2) * max(
            1.7 ** 2, 1.1 ** (2 ** 2), 1.0)
        assert iteration_bound(p, 2) == pytest.approx(expected, rel=1e-12)

    def test_overflow_reports_log2(self):
        p = _problem(a_bar=2.0, growth_rate=2.0, init_root=1.5, anchor_sup=3.0)
        with pytest.raises(IterationOverflowError) as err:
            iteration_bound(p, 14)
        assert err.value.log2_bound > 1024.0
        assert err.value.log2_bound == iteration_bound_log2(p, 14)

    def test_oracle_requires_envelope_at_least_one(self):
        p = _problem(a_bar=0.25, growth_rate=1e-9)
        with pytest.raises(ValueError, match="A_k"):
            integrate_chain(p, 2, 1.0)


class TestChainOracle:
    def test_single_level_linear_ode(self):
        # one level starting exactly at K^(2^m): y(t) <= 2 A_m max{...}
        p = _problem(a_bar=1.0, growth_rate=1.0, init_root=1.2, anchor_sup=0.5,
                     anchor_level=2)
        rec = integrate_chain(p, 2, t_max=10.0)[0]
        a_m = p.envelope(2)
        cap = 2.0 * a_m * max(p.anchor_sup ** 2, p.init_root ** 4, 1.0)
        assert rec["values"].max() <= cap * (1.0 + 1e-12)
        # exact solution of y' = c(B - y): y = B + (y0 - B) e^(-ct)
        c = p.rate(2)
        b = a_m * max(1.0, p.anchor_sup ** 2)
        t = rec["times"]
        exact = b + (rec["values"][0] - b) * np.exp(-c * t)
        assert np.max(np.abs(rec["values"] - exact)) < 1e-7 * max(1.0, b)

    def test_reference_chain_dominated(self):
        p = _problem()  # a_bar=1, D=1, c_k=k+1, K=1, sup=1, m=1
        chk = check_iteration_bound(p, 4, 10.0)
        assert chk.passed
        assert chk.worst_ratio <= 1.0

    def test_zero_anchor_small_root(self):
        p = _problem(anchor_sup=0.0, init_root=0.5)
        chk = check_iteration_bound(p, 4, 8.0)
        assert chk.passed

    def test_random_problems_dominated(self):
        rng = np.random.default_rng(20240817)
        for _ in range(100):
            m = int(rng.integers(1, 4))
            k_max = m + int(rng.integers(1, 5))
            a_bar = rng.uniform(0.5, 3.0)
            d = rng.uniform(0.1, 1.5)
            # keep A_m >= 1
            if a_bar * 2.0 ** (d * m) < 1.0:
                a_bar = 2.0 ** (-d * m) + 0.1
            p = IterationProblem(
                rates=tuple(rng.uniform(0.1, 5.0, size=k_max + 1)),
                a_bar=a_bar,
                growth_rate=d,
                init_root=rng.uniform(0.5, 1.3),
                anchor_level=m,
                anchor_sup=rng.uniform(0.0, 2.0),
            )
            chk = check_iteration_bound(p, k_max, t_max=rng.uniform(0.5, 10.0))
            assert chk.passed, (p, chk.worst_ratio, chk.worst_level)
            assert chk.worst_ratio <= 1.0 + 1e-9
