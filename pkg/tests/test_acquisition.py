"""Exploration schedule and acquisition-value tests."""

import numpy as np
import pytest

from dropout_bo.acquisition import (
    BetaSchedule,
    beta_d,
    ei_from_moments,
    ei_value,
    ucb_from_moments,
    ucb_value,
)
from dropout_bo.kernels_gp import KernelParams, fit

# mpmath, 30 digits: t=1, d=5, delta=0.1, a=b=r=1, multiplier=1
BETA_1_5 = 32.804485098217664
PHI_0 = 0.3989422804014327

DEFAULT = BetaSchedule(d=5, delta=0.1, a=1.0, b=1.0, r=1.0, multiplier=1.0)


class TestBetaSchedule:
    def test_frozen_value(self):
        assert beta_d(1, DEFAULT) == pytest.approx(BETA_1_5, abs=1e-9)

    def test_monotone_in_t(self):
        vals = [beta_d(t, DEFAULT) for t in range(1, 1001)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_multiplier_scales_linearly(self):
        scaled = BetaSchedule(d=5, delta=0.1, multiplier=0.2)
        assert beta_d(7, scaled) == pytest.approx(0.2 * beta_d(7, DEFAULT), rel=1e-15)

    def test_positive_at_defaults(self):
        assert beta_d(1, BetaSchedule(d=1)) > 0.0

    def test_invalid_parameters(self):
        with pytest.raises(ValueError, match="delta"):
            BetaSchedule(d=5, delta=1.5)
        with pytest.raises(ValueError, match="4\\*d\\*a/delta"):
            BetaSchedule(d=1, a=0.01, delta=0.1)
        with pytest.raises(ValueError):
            beta_d(0, DEFAULT)


class TestUcb:
    def test_beta_zero_is_mean(self):
        gp = fit([[0.2], [0.8]], [1.0, -1.0], KernelParams(0.1, 1.0), 1e-6)
        mean, _ = gp.mean_var([0.4])
        assert ucb_value(gp, [0.4], 0.0) == pytest.approx(mean, abs=1e-15)

    def test_near_interpolated_point(self):
        gp = fit([[0.5]], [2.0], KernelParams(0.1, 1.0), 1e-6)
        mean, var = gp.mean_var([0.5])
        assert var < 1e-4
        assert ucb_value(gp, [0.5], 4.0) == pytest.approx(mean, abs=0.05)

    def test_stubbed_moments(self):
        assert ucb_from_moments(0.5, 0.04, 4.0) == pytest.approx(0.9, abs=1e-12)

    def test_never_below_mean(self):
        rng = np.random.default_rng(0)
        gp = fit(rng.random((6, 2)), rng.normal(size=6), KernelParams(0.1, 1.0), 1e-6)
        for _ in range(20):
            x = rng.random(2)
            mean, _ = gp.mean_var(x)
            assert ucb_value(gp, x, 2.5) >= mean

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            ucb_from_moments(0.0, 1.0, -1.0)


class TestEi:
    def test_zero_sigma_no_improvement(self):
        assert ei_from_moments(0.3, 0.0, 0.5) == 0.0
        assert ei_from_moments(0.5, 0.0, 0.5) == 0.0

    def test_at_the_incumbent(self):
        assert ei_from_moments(1.0, 1.0, 1.0) == pytest.approx(PHI_0, abs=1e-12)

    def test_vanishing_sigma_limit(self):
        for sigma in (1e-3, 1e-6, 1e-9):
            assert ei_from_moments(2.0, sigma, 1.0) == pytest.approx(1.0, abs=1e-2)
        assert ei_from_moments(2.0, 0.0, 1.0) == 1.0

    def test_nonnegative_and_monotone_in_mean(self):
        sigmas = [0.0, 0.1, 1.0, 3.0]
        means = np.linspace(-2.0, 2.0, 41)
        for s in sigmas:
            vals = [ei_from_moments(m, s, 0.25) for m in means]
            assert all(v >= 0.0 for v in vals)
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_gp_wrapper(self):
        gp = fit([[0.0], [1.0]], [0.0, 1.0], KernelParams(0.3, 1.0), 1e-6)
        assert ei_value(gp, [0.5], 5.0) >= 0.0
        with pytest.raises(ValueError):
            ei_value(gp, [0.5], np.inf)
