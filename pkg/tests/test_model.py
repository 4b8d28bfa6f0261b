import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlfkpp import (
    Field,
    Grid1D,
    Kernel,
    ModelParams,
    Periodic,
    kernel_evaluate,
    rescale_to_mu,
    rescale_to_sigma,
    steady_state,
)
from nlfkpp.model import NonFiniteFieldError, front_initial_condition, powered

from conftest import BUILTIN_SHAPES, dirichlet_grid, periodic_grid, triangle_kernel


class TestModelParams:
    def test_steady_state_identity_case(self):
        assert steady_state(ModelParams(1.0, 1.0, 1.0, 1.0)) == 1.0

    def test_steady_state_small_beta_kappa(self):
        # kappa = 0.2, beta = 0.1 -> 5**10
        p = ModelParams(alpha=1.1, beta=0.1, mu=150.0, kappa=0.2)
        assert steady_state(p) == pytest.approx(9765625.0, rel=1e-12)

    def test_steady_state_direct(self):
        p = ModelParams(alpha=1.0, beta=2.0, mu=1.0, kappa=4.0)
        assert steady_state(p) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("bad", [
        dict(alpha=0.5, beta=1, mu=1, kappa=1),
        dict(alpha=1, beta=0, mu=1, kappa=1),
        dict(alpha=1, beta=1, mu=-1, kappa=1),
        dict(alpha=1, beta=1, mu=1, kappa=0),
        dict(alpha=1, beta=1, mu=1, kappa=1, diffusion=-1),
    ])
    def test_invalid_params_rejected(self, bad):
        with pytest.raises(ValueError):
            ModelParams(**bad)

    def test_overflowing_steady_state_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(alpha=1.0, beta=0.1, mu=1.0, kappa=1e-40)

    @given(kappa1=st.floats(0.01, 100.0), kappa2=st.floats(0.01, 100.0),
           beta=st.floats(0.05, 5.0))
    def test_steady_state_decreasing_in_kappa(self, kappa1, kappa2, beta):
        if kappa1 == kappa2:
            return
        lo, hi = sorted((kappa1, kappa2))
        s_lo = steady_state(ModelParams(1.0, beta, 1.0, lo))
        s_hi = steady_state(ModelParams(1.0, beta, 1.0, hi))
        assert s_lo > s_hi


class TestKernel:
    def test_uniform_at_origin(self):
        assert kernel_evaluate(Kernel("uniform"), 0.0) == 0.5

    def test_logistic_at_origin(self):
        assert kernel_evaluate(Kernel("logistic"), 0.0) == pytest.approx(0.25, rel=1e-15)

    def test_uniform_sigma_scaling_at_origin(self):
        assert kernel_evaluate(Kernel("uniform", sigma=2.0), 0.0) == 0.25

    @pytest.mark.parametrize("shape", BUILTIN_SHAPES)
    @pytest.mark.parametrize("sigma", [0.25, 1.0, 3.7])
    def test_normalization(self, shape, sigma):
        k = Kernel(shape, sigma=sigma)
        _, w = k.cell_weights(sigma / 40.0)
        assert abs(w.sum() - 1.0) < 1e-10

    def test_tabulated_normalization(self):
        _, w = triangle_kernel().cell_weights(0.01)
        assert abs(w.sum() - 1.0) < 1e-10

    @pytest.mark.parametrize("shape", BUILTIN_SHAPES)
    @given(x=st.floats(-30.0, 30.0), sigma=st.floats(0.1, 10.0))
    @settings(max_examples=40)
    def test_symmetry(self, shape, x, sigma):
        k = Kernel(shape, sigma=sigma)
        assert kernel_evaluate(k, x) == pytest.approx(kernel_evaluate(k, -x),
                                                      rel=1e-14, abs=1e-300)

    @pytest.mark.parametrize("shape", BUILTIN_SHAPES)
    @given(x=st.floats(-8.0, 8.0), sigma=st.floats(0.1, 10.0))
    @settings(max_examples=40)
    def test_sigma_scaling_consistency(self, shape, x, sigma):
        scaled = kernel_evaluate(Kernel(shape, sigma=sigma), x)
        base = kernel_evaluate(Kernel(shape), x / sigma) / sigma
        assert scaled == pytest.approx(base, rel=5e-16, abs=1e-300)

    @pytest.mark.parametrize("shape", BUILTIN_SHAPES)
    def test_floor_condition(self, shape):
        # kernel exceeds its floor value on |x| <= floor radius
        k = Kernel(shape, sigma=1.3)
        xs = np.linspace(-k.scaled_floor_radius, k.scaled_floor_radius, 501)
        assert np.all(k.evaluate(xs) > k.scaled_floor_value)

    def test_tabulated_outside_range_is_zero(self):
        k = triangle_kernel()
        assert kernel_evaluate(k, 1.5) == 0.0
        assert kernel_evaluate(k, -2.0) == 0.0

    def test_tabulated_interpolates(self):
        k = triangle_kernel()
        assert kernel_evaluate(k, 0.5) == pytest.approx(0.5)
        assert kernel_evaluate(k, -0.25) == pytest.approx(0.75)

    def test_tabulated_bad_mass_rejected(self):
        with pytest.raises(ValueError, match="mass"):
            Kernel("tabulated", samples=((-1.0, 0.0), (0.0, 1.5), (1.0, 0.0)),
                   floor_radius=0.5, floor_value=0.4)

    def test_tabulated_needs_floor_constants(self):
        with pytest.raises(ValueError, match="floor"):
            Kernel("tabulated", samples=((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)))

    def test_cdf_matches_quadrature(self):
        for shape in BUILTIN_SHAPES:
            k = Kernel(shape, sigma=1.7)
            # trapezoid is only first order across the uniform kernel's jumps
            tol = 1e-5 if shape == "uniform" else 5e-9
            for q in (-1.0, 0.3, 2.2):
                xs = np.linspace(-k.support_radius, q, 200001)
                quad = np.trapezoid(k.evaluate(xs), xs)
                assert k.cdf(q) == pytest.approx(quad, abs=tol)


class TestRescaling:
    def test_identity_sigma_one(self):
        k, p = rescale_to_mu(Kernel("uniform"), ModelParams(1.5, 1, 1, 1))
        assert p.mu == 1.0 and k.sigma == 1.0

    def test_sigma_squared(self):
        k, p = rescale_to_mu(Kernel("uniform", sigma=math.sqrt(10.0)),
                             ModelParams(1.5, 1, 1, 1))
        assert p.mu == pytest.approx(10.0, rel=1e-15)
        assert k.sigma == 1.0

    @given(sigma=st.floats(0.1, 30.0))
    @settings(max_examples=50)
    def test_round_trip(self, sigma):
        k0 = Kernel("logistic", sigma=sigma)
        p0 = ModelParams(2.0, 1.5, 1.0, 3.0)
        k1, p1 = rescale_to_mu(k0, p0)
        k2, p2 = rescale_to_sigma(k1, p1)
        assert k2.sigma == pytest.approx(sigma, rel=1e-15)
        assert p2.mu == 1.0

    def test_requires_diffusion(self):
        with pytest.raises(ValueError):
            rescale_to_mu(Kernel("uniform", sigma=2.0),
                          ModelParams(1.0, 1.0, 1.0, 1.0, diffusion=0.0))


class TestGridField:
    def test_grid_nodes_uniform(self):
        g = periodic_grid(10, 0.0, 1.0)
        x = g.nodes()
        assert len(x) == 10
        assert np.allclose(np.diff(x), g.spacing)

    def test_dirichlet_includes_both_ends(self):
        g = dirichlet_grid(10, 0.0, 1.0)
        x = g.nodes()
        assert len(x) == 11
        assert x[0] == 0.0 and x[-1] == pytest.approx(1.0)

    def test_grid_rejects_inverted_interval(self):
        with pytest.raises(ValueError):
            Grid1D(1.0, 0.0, 8)

    def test_field_rejects_nan(self):
        g = periodic_grid(8)
        vals = np.zeros(8)
        vals[3] = np.nan
        with pytest.raises(NonFiniteFieldError, match="node 3"):
            Field(g, vals)

    def test_field_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            Field(periodic_grid(8), np.zeros(9))

    def test_field_values_read_only(self):
        f = Field(periodic_grid(8), np.zeros(8))
        with pytest.raises(ValueError):
            f.values[0] = 1.0


class TestFrontInitialCondition:
    def test_branch_values(self):
        g = dirichlet_grid(1000, -5.0, 5.0)
        f = front_initial_condition(g)
        x = g.nodes()
        assert f.values[0] == 1.0                        # x = x_l
        i0 = int(np.argmin(np.abs(x)))                   # x = 0
        assert x[i0] == 0.0
        assert f.values[i0] == pytest.approx(math.exp(-25.0), rel=1e-14)
        assert f.values[-1] == 0.0                       # x = x_r

    def test_linear_ramp_on_right(self):
        g = dirichlet_grid(10, -5.0, 5.0)
        f = front_initial_condition(g)
        x = g.nodes()
        right = x > 0
        expected = math.exp(-25.0) * (1.0 - x[right] / 5.0)
        assert np.allclose(f.values[right], expected, rtol=1e-14)

    def test_requires_zero_inside(self):
        with pytest.raises(ValueError):
            front_initial_condition(dirichlet_grid(10, 1.0, 2.0))


class TestPowered:
    def test_integer_exponent_passes_negatives(self):
        out = powered(np.array([-2.0, 3.0]), 2.0)
        assert out[0] == 4.0

    def test_tiny_negative_clamped(self):
        out = powered(np.array([-1e-17, 4.0]), 0.5)
        assert out[0] == 0.0 and out[1] == 2.0

    def test_large_negative_raises_with_node(self):
        from nlfkpp.model import NegativeValueError
        with pytest.raises(NegativeValueError) as err:
            powered(np.array([1.0, -0.5, 2.0]), 1.5)
        assert err.value.node == 1
