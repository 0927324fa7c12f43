"""Tests for the sampling validators: row-norm estimator properties, the
uniform-distribution counting test, success-rate curves, and the thresholded
likelihood-ratio discriminator."""
import warnings

import numpy as np
import pytest

from fpl import numerics
from fpl import validation as vl
from fpl.boson import FockState, output_distribution, sample
from fpl.errors import InputError

T9 = FockState((1, 1, 1, 0, 0, 0, 0, 0, 0))
T7 = FockState((1, 1, 1, 0, 0, 0, 0))


class TestRowNormEstimator:
    def test_unit_rows_give_one(self):
        U = np.eye(4, dtype=complex)
        S = T = FockState((1, 1, 1, 0))
        assert vl.row_norm_estimator(U, T, S) == pytest.approx(1.0)

    def test_zero_row_gives_zero(self):
        U = np.eye(4, dtype=complex)
        T = FockState((1, 1, 0, 0))
        S = FockState((0, 0, 1, 1))
        assert vl.row_norm_estimator(U, T, S) == 0.0

    def test_row_phase_invariance(self):
        rng = numerics.random_source(0)
        U = numerics.haar_unitary(6, rng)
        T = FockState((1, 1, 1, 0, 0, 0))
        S = FockState((0, 1, 0, 1, 0, 1))
        r0 = vl.row_norm_estimator(U, T, S)
        V = U.copy()
        V[3, :] *= np.exp(0.7j)
        assert vl.row_norm_estimator(V, T, S) == pytest.approx(r0)

    def test_collision_outcome_rejected(self):
        U = numerics.haar_unitary(4, numerics.random_source(1))
        with pytest.raises(InputError):
            vl.row_norm_estimator(U, FockState((1, 1, 0, 0)), FockState((2, 0, 0, 0)))


class TestUniformTest:
    def test_quantum_source_detected(self):
        U = numerics.haar_unitary(9, numerics.random_source(100))
        rng = numerics.random_source(2)
        dist = output_distribution(U, T9, "quantum")
        hits = sum(vl.aa_uniform_test(sample(dist, rng, 500), U, T9).verdict
                   == "BosonSampler" for _ in range(50))
        assert hits / 50 >= 0.95

    def test_uniform_source_detected(self):
        U = numerics.haar_unitary(9, numerics.random_source(100))
        rng = numerics.random_source(3)
        dist = vl.uniform_no_collision(9, 3)
        hits = sum(vl.aa_uniform_test(sample(dist, rng, 500), U, T9).verdict
                   == "UniformSampler" for _ in range(50))
        assert hits / 50 >= 0.95

    def test_empty_sample_inconclusive(self):
        U = numerics.haar_unitary(9, numerics.random_source(4))
        trace = vl.aa_uniform_test([], U, T9)
        assert trace.verdict == "Inconclusive" and trace.N == 0

    def test_collisions_skipped_and_counted(self):
        U = numerics.haar_unitary(4, numerics.random_source(5))
        T = FockState((1, 1, 0, 0))
        samples = [FockState((2, 0, 0, 0)), FockState((1, 0, 1, 0)),
                   FockState((0, 2, 0, 0))]
        trace = vl.aa_uniform_test(samples, U, T)
        assert trace.skipped_collisions == 2 and trace.N == 1

    def test_verdict_sign_matches_counter(self):
        U = numerics.haar_unitary(9, numerics.random_source(6))
        rng = numerics.random_source(7)
        dist = output_distribution(U, T9, "quantum")
        trace = vl.aa_uniform_test(sample(dist, rng, 99), U, T9)
        expected = "BosonSampler" if trace.counter > 0 else \
            "UniformSampler" if trace.counter < 0 else "Inconclusive"
        assert trace.verdict == expected
        assert trace.counter == sum(trace.increments)

    def test_deterministic_in_sample_multiset(self):
        U = numerics.haar_unitary(9, numerics.random_source(8))
        rng = numerics.random_source(9)
        samples = sample(output_distribution(U, T9, "quantum"), rng, 50)
        t1 = vl.aa_uniform_test(samples, U, T9)
        t2 = vl.aa_uniform_test(list(reversed(samples)), U, T9)
        assert t1.counter == t2.counter and t1.verdict == t2.verdict


class TestSuccessRateCurve:
    def test_rows_and_rates(self):
        U = numerics.haar_unitary(9, numerics.random_source(100))
        rng = numerics.random_source(10)
        rows = vl.success_rate_curve(U, T9, "quantum", [10, 100, 500], 20, rng)
        assert [r["N_set"] for r in rows] == [10, 100, 500]
        assert all(0.0 <= r["success_rate"] <= 1.0 for r in rows)
        assert rows[-1]["success_rate"] >= 0.95

    def test_trend_not_decreasing_much(self):
        U = numerics.haar_unitary(9, numerics.random_source(100))
        rng = numerics.random_source(11)
        rows = vl.success_rate_curve(U, T9, "quantum", [20, 500], 30, rng)
        assert rows[1]["success_rate"] >= rows[0]["success_rate"] - 0.1

    def test_unknown_source_rejected(self):
        U = numerics.haar_unitary(9, numerics.random_source(12))
        with pytest.raises(InputError):
            vl.success_rate_curve(U, T9, "thermal", [10], 5, numerics.random_source(13))


class TestLikelihoodDiscriminator:
    def test_equal_distributions_all_inconclusive(self):
        U = numerics.haar_unitary(7, numerics.random_source(14))
        p = output_distribution(U, T7, "quantum")
        rng = numerics.random_source(15)
        trace = vl.likelihood_discriminator(sample(p, rng, 50), p, p)
        assert trace.counter == 0 and trace.verdict == "Inconclusive"
        assert all(i == 0 for i in trace.increments)

    def test_indistinguishable_source_detected(self):
        rng = numerics.random_source(16)
        hits = 0
        for _ in range(40):
            U = numerics.haar_unitary(7, rng)
            p = output_distribution(U, T7, "quantum")
            q = output_distribution(U, T7, "classical")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                trace = vl.likelihood_discriminator(sample(p, rng, 200), p, q)
            hits += trace.verdict == "Indistinguishable"
        assert hits / 40 >= 0.95

    def test_distinguishable_source_detected(self):
        rng = numerics.random_source(17)
        hits = 0
        for _ in range(40):
            U = numerics.haar_unitary(7, rng)
            p = output_distribution(U, T7, "quantum")
            q = output_distribution(U, T7, "classical")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                trace = vl.likelihood_discriminator(sample(q, rng, 200), p, q)
            hits += trace.verdict == "Distinguishable"
        assert hits / 40 >= 0.95

    def test_antisymmetry(self):
        rng = numerics.random_source(18)
        U = numerics.haar_unitary(7, rng)
        p = output_distribution(U, T7, "quantum")
        q = output_distribution(U, T7, "classical")
        s = sample(p, rng, 100)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d1 = vl.likelihood_discriminator(s, p, q)
            d2 = vl.likelihood_discriminator(s, q, p)
        assert d2.counter == -d1.counter
        assert d2.increments == tuple(-i for i in d1.increments)

    def test_boundary_closures(self):
        k1, k2 = 0.9, 1.5
        assert vl._score(k2, 1.0, k1, k2)[0] == 2
        assert vl._score(1.0 / k1, 1.0, k1, k2)[0] == 1
        assert vl._score(k1, 1.0, k1, k2)[0] == -1
        assert vl._score(1.0 / k2, 1.0, k1, k2)[0] == -2
        assert vl._score(1.0, 1.0, k1, k2)[0] == 0

    def test_scores_partition_ratio_axis(self):
        k1, k2 = 0.9, 1.5
        for rho in np.geomspace(0.01, 100, 400):
            inc, _ = vl._score(rho, 1.0, k1, k2)
            regions = [rho >= k2, 1.0 / k1 <= rho < k2, k1 < rho < 1.0 / k1,
                       1.0 / k2 < rho <= k1, rho <= 1.0 / k2]
            assert sum(regions) == 1
            assert inc == [2, 1, 0, -1, -2][regions.index(True)]

    def test_zero_probability_scoring_warns(self):
        with pytest.warns(UserWarning):
            assert vl._score(0.1, 0.0, 0.9, 1.5)[0] == 2
        with pytest.warns(UserWarning):
            assert vl._score(0.0, 0.1, 0.9, 1.5)[0] == -2

    def test_bad_thresholds_rejected(self):
        U = numerics.haar_unitary(7, numerics.random_source(19))
        p = output_distribution(U, T7, "quantum")
        with pytest.raises(InputError):
            vl.likelihood_discriminator([], p, p, k1=1.2)


class TestInterfaces:
    def test_trace_json(self):
        U = numerics.haar_unitary(9, numerics.random_source(20))
        rng = numerics.random_source(21)
        trace = vl.aa_uniform_test(sample(output_distribution(U, T9, "quantum"),
                                          rng, 30), U, T9)
        obj = vl.trace_to_json(trace)
        assert set(obj) == {"test", "N", "counter", "verdict", "skipped_collisions"}

    def test_curve_csv(self, tmp_path):
        U = numerics.haar_unitary(9, numerics.random_source(100))
        rng = numerics.random_source(22)
        rows = vl.success_rate_curve(U, T9, "uniform", [10, 50], 5, rng)
        path = tmp_path / "curve.csv"
        vl.curve_to_csv(rows, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "N_set,success_rate,trials"
        assert len(lines) == 3
