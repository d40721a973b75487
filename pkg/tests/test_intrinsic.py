"""Closed-form bias/risk and Monte Carlo estimator tests."""

import numpy as np
import pytest
from mpmath import mp

from wishart_means import (
    EstimatorKind,
    SeedSpec,
    WishartModel,
    bias_coefficient,
    exp_map,
    intrinsic_bias_arithmetic,
    intrinsic_bias_frechet,
    monte_carlo_bias_risk,
    random_hpd,
    risk_decomposition,
    scalar_risk_arithmetic,
    scalar_risk_frechet,
)
from wishart_means.errors import DomainError

mp.dps = 30


def _mp_risk_frechet(k, n):
    return float(mp.polygamma(1, k) / n + (mp.digamma(k) - mp.log(k)) ** 2)


def _mp_risk_arithmetic(k, n):
    kn = k * n
    return float(mp.polygamma(1, kn) + (mp.digamma(kn) - mp.log(kn)) ** 2)


class TestAnalyticBias:
    def test_frechet_reference_value(self):
        # 3 x (bias coefficient at dof 20)^2, anchored to the rounded -0.0788.
        assert intrinsic_bias_frechet(3, 20) == pytest.approx(
            3 * 0.0788**2, abs=3e-4
        )

    def test_frechet_is_p_b_squared(self):
        b = bias_coefficient(25, 4)
        assert intrinsic_bias_frechet(4, 25) == pytest.approx(4 * b * b, rel=1e-15)

    def test_scalar_reduction(self):
        from wishart_means import digamma

        for k in (3, 20):
            expected = (digamma(float(k)) - np.log(k)) ** 2
            assert intrinsic_bias_frechet(1, k) == pytest.approx(expected, rel=1e-14)

    def test_decreasing_in_dof(self):
        for p in (1, 3):
            ks = np.arange(p, 201, dtype=float)
            vals = intrinsic_bias_frechet(p, ks)
            assert np.all(np.diff(vals) < 0.0)

    def test_arithmetic_at_single_sample(self):
        assert intrinsic_bias_arithmetic(3, 20, 1) == intrinsic_bias_frechet(3, 20)

    def test_arithmetic_equals_pooled_frechet(self):
        assert intrinsic_bias_arithmetic(2, 10, 7) == pytest.approx(
            intrinsic_bias_frechet(2, 70), rel=1e-15
        )

    def test_arithmetic_vanishes_for_large_n(self):
        assert intrinsic_bias_arithmetic(1, 20, 10**6) < 1e-12

    def test_ordering_for_n_at_least_two(self):
        for p in (1, 2, 5):
            for n in (2, 10):
                ks = np.arange(p, 100, dtype=float)
                assert np.all(
                    intrinsic_bias_frechet(p, ks)
                    > intrinsic_bias_arithmetic(p, ks, n)
                )

    def test_domain(self):
        with pytest.raises(DomainError):
            intrinsic_bias_frechet(3, 2)
        with pytest.raises(DomainError):
            intrinsic_bias_arithmetic(3, 20, 0)


class TestScalarRisks:
    def test_frechet_against_mpmath(self):
        assert scalar_risk_frechet(20, 3) == pytest.approx(
            _mp_risk_frechet(20, 3), abs=1e-13
        )

    def test_arithmetic_against_mpmath(self):
        assert scalar_risk_arithmetic(20, 3) == pytest.approx(
            _mp_risk_arithmetic(20, 3), abs=1e-13
        )

    def test_reference_values(self):
        assert scalar_risk_frechet(20, 3) == pytest.approx(0.017726, abs=2e-5)
        assert scalar_risk_arithmetic(20, 3) == pytest.approx(0.016875, abs=2e-5)

    def test_large_n_limit_is_bias_floor(self):
        floor = intrinsic_bias_frechet(1, 20)
        assert scalar_risk_frechet(20, 10**9) == pytest.approx(floor, abs=1e-9)

    def test_single_sample_risks_coincide(self):
        assert scalar_risk_frechet(20, 1) == pytest.approx(
            scalar_risk_arithmetic(20, 1), rel=1e-15
        )

    def test_frechet_risk_decreasing_in_n(self):
        ns = np.arange(1.0, 30.0)
        vals = scalar_risk_frechet(20.0, ns)
        assert np.all(np.diff(vals) < 0.0)

    def test_difference_positive_smoke(self):
        ks = np.arange(1.0, 51.0)
        for n in (2.0, 7.0, 50.0):
            assert np.all(scalar_risk_frechet(ks, n) > scalar_risk_arithmetic(ks, n))

    def test_domain(self):
        with pytest.raises(DomainError):
            scalar_risk_frechet(0, 3)
        with pytest.raises(DomainError):
            scalar_risk_arithmetic(20, 0)


class TestMonteCarlo:
    def test_deterministic(self):
        model = WishartModel.identity(2, 8)
        a = monte_carlo_bias_risk("frechet", model, 2, 60, SeedSpec(200))
        b = monte_carlo_bias_risk(
            EstimatorKind.FRECHET_MEAN, model, 2, 60, SeedSpec(200)
        )
        assert np.array_equal(a.mean_tangent.array, b.mean_tangent.array)
        assert a.risk_hat == b.risk_hat
        assert a.ibias_hat == b.ibias_hat

    def test_worker_count_invariance(self):
        model = WishartModel.identity(2, 8)
        serial = monte_carlo_bias_risk("frechet", model, 2, 80, SeedSpec(201), workers=1)
        parallel = monte_carlo_bias_risk(
            "frechet", model, 2, 80, SeedSpec(201), workers=2
        )
        assert np.array_equal(serial.mean_tangent.array, parallel.mean_tangent.array)
        assert np.array_equal(serial.entry_variances, parallel.entry_variances)
        assert serial.risk_hat == parallel.risk_hat
        assert serial.ibias_se == parallel.ibias_se

    def test_risk_dominates_bias(self):
        for kind in EstimatorKind:
            rep = monte_carlo_bias_risk(
                kind, WishartModel.identity(2, 6), 2, 80, SeedSpec(202)
            )
            assert rep.risk_hat >= rep.ibias_hat
            assert rep.ibias_se >= 0.0 and rep.risk_se >= 0.0

    def test_validation(self):
        model = WishartModel.identity(1, 4)
        with pytest.raises(ValueError):
            monte_carlo_bias_risk("frechet", model, 2, 1, SeedSpec(203))
        with pytest.raises(ValueError):
            monte_carlo_bias_risk("frechet", model, 0, 10, SeedSpec(203))
        with pytest.raises(ValueError):
            monte_carlo_bias_risk("nonsense", model, 2, 10, SeedSpec(203))

    def test_arithmetic_scalar_bias_matches_formula(self):
        k, n, reps = 20, 3, 20_000
        rep = monte_carlo_bias_risk(
            "arithmetic", WishartModel.identity(1, k), n, reps, SeedSpec(204)
        )
        target = intrinsic_bias_arithmetic(1, k, n)
        assert abs(rep.ibias_hat - target) <= 4 * rep.ibias_se
        risk_target = scalar_risk_arithmetic(k, n)
        assert abs(rep.risk_hat - risk_target) <= 4 * rep.risk_se
        # The mean tangent itself sits at the bias coefficient of the pooled dof.
        b = bias_coefficient(k * n, 1)
        se = np.sqrt(rep.entry_variances[0, 0] / reps)
        assert abs(rep.mean_tangent.array[0, 0].real - b) <= 4 * se

    def test_frechet_scalar_risk_matches_formula(self):
        k, n = 20, 3
        rep = monte_carlo_bias_risk(
            "frechet", WishartModel.identity(1, k), n, 5_000, SeedSpec(205)
        )
        assert abs(rep.risk_hat - scalar_risk_frechet(k, n)) <= 4 * rep.risk_se

    def test_decomposition(self):
        rep = monte_carlo_bias_risk(
            "frechet", WishartModel.identity(2, 10), 3, 2_000, SeedSpec(206)
        )
        variance_sum, ibias = risk_decomposition(rep)
        assert ibias == rep.ibias_hat
        assert variance_sum == pytest.approx(rep.variance_sum)
        assert abs(rep.risk_hat - variance_sum - ibias) <= 4 * np.hypot(
            rep.risk_se, rep.ibias_se
        )

    def test_single_sample_decomposition_targets(self):
        # One scalar estimate per replication: the variance part of the risk
        # approaches trigamma(K) and the bias part [digamma(K) - log K]^2.
        from wishart_means import digamma, trigamma

        k, reps = 20, 20_000
        rep = monte_carlo_bias_risk(
            "arithmetic", WishartModel.identity(1, k), 1, reps, SeedSpec(240)
        )
        gate = 4 * np.hypot(rep.risk_se, rep.ibias_se)
        assert abs(rep.variance_sum - trigamma(float(k))) <= gate
        bias_target = (digamma(float(k)) - np.log(k)) ** 2
        assert abs(rep.ibias_hat - bias_target) <= 4 * rep.ibias_se

    def test_mean_tangent_structure(self):
        # Off-diagonal means vanish and diagonal means coincide, within 4 SE.
        reps = 4_000
        rep = monte_carlo_bias_risk(
            "frechet", WishartModel.identity(2, 10), 2, reps, SeedSpec(207)
        )
        t = rep.mean_tangent_whitened.array
        se = np.sqrt(np.asarray(rep.entry_variances) / reps)
        assert abs(t[0, 1]) <= 4 * se[0, 1]
        d0, d1 = t[0, 0].real, t[1, 1].real
        assert abs(d0 - d1) <= 4 * np.hypot(se[0, 0], se[1, 1])

    def test_sigma_invariance_paired_seeds(self):
        # Same streams under sigma = I and a random sigma: the whitened
        # tangents coincide up to solver tolerance, so the bias estimates
        # agree far inside the 4 SE gate.
        p, k, n, reps = 2, 8, 2, 1_500
        seed = SeedSpec(208)
        rep_i = monte_carlo_bias_risk(
            "frechet", WishartModel.identity(p, k), n, reps, seed
        )
        sigma = random_hpd(p, 209)
        rep_s = monte_carlo_bias_risk(
            "frechet", WishartModel(p=p, dof=k, sigma=sigma), n, reps, seed
        )
        diff = abs(rep_i.ibias_hat - rep_s.ibias_hat)
        assert diff <= 4 * np.hypot(rep_i.ibias_se, rep_s.ibias_se)
        assert diff < 1e-6  # exact equivariance up to solver tolerance

    def test_risk_trend_with_sample_count(self):
        # Frechet risk decreases toward the intrinsic-bias floor; arithmetic
        # risk decreases toward zero and sits below it for large N.
        p, k, reps = 2, 8, 1_200
        floor = intrinsic_bias_frechet(p, k)
        risks_f, ses_f, risks_a = [], [], []
        for i, n in enumerate((5, 20, 80)):
            rep_f = monte_carlo_bias_risk(
                "frechet", WishartModel.identity(p, k), n, reps, SeedSpec(210 + i)
            )
            rep_a = monte_carlo_bias_risk(
                "arithmetic", WishartModel.identity(p, k), n, reps, SeedSpec(220 + i)
            )
            risks_f.append(rep_f.risk_hat)
            ses_f.append(rep_f.risk_se)
            risks_a.append(rep_a.risk_hat)
        assert risks_f[0] > risks_f[1] > risks_f[2]
        assert risks_f[2] > floor - 4 * ses_f[2]
        assert abs(risks_f[2] - floor) < abs(risks_f[0] - floor)
        assert risks_a[0] > risks_a[1] > risks_a[2]
        assert risks_a[2] < risks_f[2]

    def test_manifold_expectation_wiring(self):
        rep = monte_carlo_bias_risk(
            "frechet", WishartModel.identity(2, 10), 2, 200, SeedSpec(230)
        )
        recomputed = exp_map(rep.sigma, rep.mean_tangent)
        assert np.linalg.norm(rep.manifold_expectation.array - recomputed.array) < 1e-10

    def test_report_metadata(self):
        seed = SeedSpec(231, 5)
        rep = monte_carlo_bias_risk(
            "arithmetic", WishartModel.identity(2, 6), 3, 50, seed
        )
        assert rep.replications == 50
        assert rep.seed == seed
        assert rep.n_samples == 3
        assert rep.estimator is EstimatorKind.ARITHMETIC_MEAN
