"""Tests for multi-photon interference probabilities, sampling, bunching laws
and the depth-3 weak simulator.

Collision formulas are checked against the counting oracle
1 - C(m,n)/C(m+n-1,n); the weak simulator against the exact permanent-based
distribution of the assembled circuit unitary.
"""
import math

import numpy as np
import pytest

from fpl import boson, numerics
from fpl.boson import DistinguishabilityModel, FockState
from fpl.errors import CapacityError, InputError, UndefinedVisibilityError


def fock(*occ):
    return FockState(tuple(occ))


def hom_bs():
    s = 1 / math.sqrt(2)
    return np.array([[s, 1j * s], [1j * s, s]])


def embed(m, pair, V):
    U = np.eye(m, dtype=complex)
    i, j = pair[0] - 1, pair[1] - 1
    U[np.ix_([i, j], [i, j])] = V
    return U


class TestEnumerateSpace:
    def test_two_mode_two_photon(self):
        occ = [S.occupations for S in boson.enumerate_space(2, 2)]
        assert occ == [(2, 0), (1, 1), (0, 2)]

    def test_counts(self):
        assert len(boson.enumerate_space(5, 3)) == 35
        assert len(boson.enumerate_space(5, 3, no_collision=True)) == math.comb(5, 3)

    def test_symbolic_count_without_enumeration(self):
        assert boson.space_size(420, 20) == math.comb(439, 20)
        assert boson.space_size(420, 20) > 7e33

    def test_overflow_guard(self):
        with pytest.raises(CapacityError):
            boson.enumerate_space(420, 20)

    def test_no_collision_flag(self):
        space = boson.enumerate_space(4, 2, no_collision=True)
        assert all(S.no_collision for S in space)


class TestFockState:
    def test_properties(self):
        S = fock(1, 0, 2)
        assert S.n == 3 and S.m == 3 and not S.no_collision

    def test_string_round_trip(self):
        S = fock(1, 0, 2, 0, 0)
        assert S.to_string() == "1|0|2|0|0"
        assert FockState.from_string(S.to_string()) == S

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            fock(1, -1)


class TestTransitionProbs:
    def test_hom_coincidence_suppressed(self):
        assert boson.quantum_prob(hom_bs(), fock(1, 1), fock(1, 1)) <= 1e-12

    def test_hom_bunched(self):
        assert boson.quantum_prob(hom_bs(), fock(1, 1), fock(2, 0)) == pytest.approx(0.5)

    def test_identity_point_mass(self):
        U = np.eye(3)
        assert boson.quantum_prob(U, fock(1, 1, 0), fock(1, 1, 0)) == pytest.approx(1.0)
        assert boson.quantum_prob(U, fock(1, 1, 0), fock(1, 0, 1)) == pytest.approx(0.0)

    def test_classical_hom(self):
        assert boson.classical_prob(hom_bs(), fock(1, 1), fock(1, 1)) == pytest.approx(0.5)
        assert boson.classical_prob(hom_bs(), fock(1, 1), fock(2, 0)) == pytest.approx(0.25)

    def test_photon_number_mismatch(self):
        with pytest.raises(InputError):
            boson.quantum_prob(np.eye(2), fock(1, 1), fock(1, 0))

    def test_normalization_both_regimes(self):
        rng = numerics.random_source(0)
        for m, n in ((4, 2), (5, 3), (7, 4)):
            U = numerics.haar_unitary(m, rng)
            T = fock(*([1] * n + [0] * (m - n)))
            for regime in ("quantum", "classical"):
                d = boson.output_distribution(U, T, regime)
                assert abs(d.probs.sum() - 1.0) <= 1e-9

    def test_fermionic_exclusion(self):
        # Determinant amplitudes: two fermions through any 2x2 unitary always
        # coincide, and the bunched amplitude vanishes by column repetition.
        U = numerics.haar_unitary(2, numerics.random_source(1))
        A = boson.transition_submatrix(U, fock(1, 1), fock(1, 1))
        assert abs(numerics.determinant(A)) ** 2 == pytest.approx(1.0)
        B = boson.transition_submatrix(U, fock(2, 0), fock(1, 1))
        assert abs(numerics.determinant(B)) <= 1e-12

    def test_permutation_covariance(self):
        rng = numerics.random_source(2)
        U = numerics.haar_unitary(4, rng)
        perm = [2, 0, 3, 1]
        P = np.eye(4)[perm]
        T = fock(1, 1, 0, 0)
        d1 = boson.output_distribution(U, T, "quantum")
        d2 = boson.output_distribution(P @ U @ P.T, fock(*(T.occupations[j] for j in perm)),
                                       "quantum")
        lookup = dict(zip((S.occupations for S in d2.space), d2.probs))
        for S, p in zip(d1.space, d1.probs):
            assert lookup[tuple(S.occupations[j] for j in perm)] == pytest.approx(p, abs=1e-12)


class TestMixedRegime:
    def test_singleton_groups_reduce_to_classical(self):
        U = numerics.haar_unitary(4, numerics.random_source(3))
        T = fock(1, 1, 1, 0)
        model = DistinguishabilityModel(((1,), (2,), (3,)), r=0.0)
        mixed = boson.output_distribution(U, T, "mixed", model)
        classical = boson.output_distribution(U, T, "classical")
        assert np.max(np.abs(mixed.probs - classical.probs)) <= 1e-10

    def test_single_group_reduces_to_quantum(self):
        U = numerics.haar_unitary(4, numerics.random_source(4))
        T = fock(1, 1, 1, 0)
        model = DistinguishabilityModel(((1, 2, 3),), r=0.0)
        mixed = boson.output_distribution(U, T, "mixed", model)
        quantum = boson.output_distribution(U, T, "quantum")
        assert np.max(np.abs(mixed.probs - quantum.probs)) <= 1e-10

    def test_mixture_weight_interpolates(self):
        U = numerics.haar_unitary(4, numerics.random_source(5))
        T = fock(1, 1, 0, 0)
        model = DistinguishabilityModel(((1,), (2,)), r=0.3)
        mixed = boson.output_distribution(U, T, "mixed", model)
        q = boson.output_distribution(U, T, "quantum").probs
        c = boson.output_distribution(U, T, "classical").probs
        assert np.max(np.abs(mixed.probs - (0.3 * q + 0.7 * c))) <= 1e-10

    def test_bad_partition_rejected(self):
        with pytest.raises(InputError):
            DistinguishabilityModel(((1,), (3,)), r=0.0)
        with pytest.raises(InputError):
            DistinguishabilityModel(((1,), (2,)), r=1.5)


class TestSampling:
    def test_point_mass(self):
        d = boson.output_distribution(np.eye(3), fock(1, 0, 1), "quantum")
        draws = boson.sample(d, numerics.random_source(6), 100)
        assert all(S == fock(1, 0, 1) for S in draws)

    def test_hom_never_coincides(self):
        d = boson.output_distribution(hom_bs(), fock(1, 1), "quantum")
        draws = boson.sample(d, numerics.random_source(7), 10**5)
        assert fock(1, 1) not in draws

    def test_empirical_concentration(self):
        U = numerics.haar_unitary(5, numerics.random_source(8))
        d = boson.output_distribution(U, fock(1, 1, 1, 0, 0), "quantum")
        draws = boson.sample(d, numerics.random_source(9), 10**5)
        counts = {}
        for S in draws:
            counts[S] = counts.get(S, 0) + 1
        emp = np.array([counts.get(S, 0) for S in d.space]) / len(draws)
        assert numerics.total_variation_distance(emp, d.probs) <= 0.01


class TestBunching:
    def test_hom_quantum_always_bunches(self):
        d = boson.output_distribution(hom_bs(), fock(1, 1), "quantum")
        assert boson.bunching_fraction(d) == pytest.approx(1.0)

    def test_hom_classical_half(self):
        d = boson.output_distribution(hom_bs(), fock(1, 1), "classical")
        assert boson.bunching_fraction(d) == pytest.approx(0.5)

    def test_single_photon_never_bunches(self):
        U = numerics.haar_unitary(4, numerics.random_source(10))
        d = boson.output_distribution(U, fock(1, 0, 0, 0), "quantum")
        assert boson.bunching_fraction(d) == pytest.approx(0.0, abs=1e-12)

    def test_full_bunching_ratio_values(self):
        assert boson.full_bunching_ratio(fock(1, 1, 0)) == 2
        assert boson.full_bunching_ratio(fock(1, 1, 1, 0)) == 6
        assert boson.full_bunching_ratio(fock(2, 1)) == 3

    def test_full_bunching_law_small(self):
        rng = numerics.random_source(11)
        for _ in range(10):
            U = numerics.haar_unitary(4, rng)
            T = fock(1, 1, 1, 0)
            for j in range(4):
                S = fock(*(3 if k == j else 0 for k in range(4)))
                qc = boson.classical_prob(U, T, S)
                if qc <= 1e-12:
                    continue
                assert boson.quantum_prob(U, T, S) / qc == pytest.approx(6.0, rel=1e-9)

    def test_degraded_enhancement_matches_closed_form(self):
        # Partial distinguishability alpha reduces the three-photon
        # enhancement to alpha^2 * 3! + (1 - alpha^2) * 2!.
        alpha = 0.63
        U = numerics.haar_unitary(4, numerics.random_source(12))
        T = fock(1, 1, 1, 0)
        model = DistinguishabilityModel(((1, 2), (3,)), r=alpha**2)
        mixed = boson.output_distribution(U, T, "mixed", model)
        classical = boson.output_distribution(U, T, "classical")
        for S, pm, pc in zip(mixed.space, mixed.probs, classical.probs):
            if max(S.occupations) == 3 and pc > 1e-12:
                assert pm / pc == pytest.approx(alpha**2 * 6 + (1 - alpha**2) * 2, rel=1e-9)


class TestCollisionFormulas:
    def test_birthday_paradox(self):
        assert 0.50 <= boson.classical_collision_prob(23, 365) <= 0.515

    def test_single_photon(self):
        assert boson.classical_collision_prob(1, 5) == 0.0
        assert boson.quantum_collision_prob(1, 5) == 0.0

    def test_quantum_small_case(self):
        assert boson.quantum_collision_prob(3, 6) == pytest.approx(1 - 20 / 56)

    def test_quantum_counting_oracle(self):
        for m in range(1, 15):
            for n in range(1, m + 1):
                oracle = 1 - math.comb(m, n) / math.comb(m + n - 1, n)
                assert boson.quantum_collision_prob(n, m) == pytest.approx(oracle, abs=1e-12)

    def test_more_photons_than_modes(self):
        assert boson.classical_collision_prob(5, 3) == 1.0
        with pytest.raises(InputError):
            boson.quantum_collision_prob(5, 3)

    def test_haar_average_is_maximally_mixed(self):
        rng = numerics.random_source(13)
        m, n = 4, 2
        space = boson.enumerate_space(m, n)
        T = fock(1, 1, 0, 0)
        mean = np.zeros(len(space))
        trials = 2000
        for _ in range(trials):
            U = numerics.haar_unitary(m, rng)
            mean += boson.output_distribution(U, T, "quantum").probs
        mean /= trials
        uniform = np.full(len(space), 1.0 / len(space))
        assert numerics.total_variation_distance(mean, uniform) <= 0.02


class TestVisibility:
    def test_hom_visibility_one(self):
        assert boson.visibility(hom_bs(), (1, 2), (1, 2)) == pytest.approx(1.0)

    def test_diagonal_phases_zero(self):
        U = np.diag(np.exp(1j * np.array([0.3, -1.1, 2.0])))
        assert boson.visibility(U, (1, 2), (1, 2)) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_pair_rejected(self):
        with pytest.raises(InputError):
            boson.visibility(hom_bs(), (1, 1), (1, 2))

    def test_undefined_when_classically_dark(self):
        with pytest.raises(UndefinedVisibilityError):
            boson.visibility(np.eye(4), (1, 2), (3, 4))


class TestPostselection:
    def test_no_ancilla_is_plain_distribution(self):
        U = numerics.haar_unitary(3, numerics.random_source(14))
        T = fock(1, 1, 0)
        p, cond = boson.postselected_map(U, T, (), ())
        full = boson.output_distribution(U, T, "quantum")
        assert p == pytest.approx(1.0)
        lookup = dict(zip((S.occupations for S in cond.space), cond.probs))
        for S, q in zip(full.space, full.probs):
            assert lookup.get(S.occupations, 0.0) == pytest.approx(q, abs=1e-12)

    def test_hom_heralded_bunch(self):
        p, cond = boson.postselected_map(hom_bs(), fock(1, 1), (2,), (0,))
        assert p == pytest.approx(0.5)
        assert cond.space == (fock(2),)
        assert cond.probs[0] == pytest.approx(1.0)

    def test_impossible_herald(self):
        p, cond = boson.postselected_map(np.eye(2), fock(1, 0), (1,), (0,))
        assert p == 0.0 and cond is None


class TestDepth3:
    def test_hom_gate_only(self):
        draws = boson.depth3_weak_simulate([((1, 2), hom_bs())], [], fock(1, 1),
                                           numerics.random_source(15), 4000)
        counts = {}
        for S in draws:
            counts[S] = counts.get(S, 0) + 1
        assert fock(1, 1) not in counts
        assert counts[fock(2, 0)] / 4000 == pytest.approx(0.5, abs=0.05)

    def test_identity_layers(self):
        draws = boson.depth3_weak_simulate([((1, 2), np.eye(2))], [((2, 3), np.eye(2))],
                                           fock(1, 0, 1), numerics.random_source(16), 50)
        assert all(S == fock(1, 0, 1) for S in draws)

    def test_matches_exact_distribution(self):
        rng = numerics.random_source(17)
        m = 6
        layer1 = [((1, 2), numerics.haar_unitary(2, rng)),
                  ((3, 4), numerics.haar_unitary(2, rng)),
                  ((5, 6), numerics.haar_unitary(2, rng))]
        layer2 = [((2, 3), numerics.haar_unitary(2, rng)),
                  ((4, 5), numerics.haar_unitary(2, rng))]
        U = np.eye(m, dtype=complex)
        for pair, V in layer1:
            U = embed(m, pair, V) @ U
        for pair, V in layer2:
            U = embed(m, pair, V) @ U
        T = fock(1, 0, 1, 0, 1, 0)
        exact = boson.output_distribution(U, T, "quantum")
        draws = boson.depth3_weak_simulate(layer1, layer2, T, numerics.random_source(18), 20000)
        counts = {}
        for S in draws:
            counts[S] = counts.get(S, 0) + 1
        emp = np.array([counts.get(S, 0) for S in exact.space]) / len(draws)
        assert numerics.total_variation_distance(emp, exact.probs) <= 0.03

    def test_overlapping_layer_rejected(self):
        with pytest.raises(InputError):
            boson.depth3_weak_simulate([((1, 2), np.eye(2)), ((2, 3), np.eye(2))], [],
                                       fock(1, 1, 0), numerics.random_source(19), 1)

    def test_collision_input_rejected(self):
        with pytest.raises(InputError):
            boson.depth3_weak_simulate([((1, 2), np.eye(2))], [], fock(2, 0),
                                       numerics.random_source(20), 1)


class TestSimulateExperiment:
    def test_infinite_count_limit(self):
        U = numerics.haar_unitary(4, numerics.random_source(21))
        data = boson.simulate_experiment(U, None, numerics.random_source(22))
        R, V = boson.theoretical_tensors(U)
        assert np.max(np.abs(data.R - R)) == 0.0
        assert np.max(np.abs(data.V - V)) == 0.0
        assert np.max(data.sigmaR) == 0.0 and np.max(data.sigmaV) == 0.0

    def test_visibility_tensor_symmetry(self):
        U = numerics.haar_unitary(4, numerics.random_source(23))
        _, V = boson.theoretical_tensors(U)
        assert np.max(np.abs(V - V.transpose(1, 0, 2, 3))) == 0.0
        assert np.max(np.abs(V - V.transpose(0, 1, 3, 2))) == 0.0

    def test_finite_counts_close_and_normalized(self):
        U = numerics.haar_unitary(5, numerics.random_source(24))
        data = boson.simulate_experiment(U, 10**4, numerics.random_source(25))
        R, _ = boson.theoretical_tensors(U)
        assert np.max(np.abs(data.R.sum(axis=0) - 1.0)) <= 1e-12
        assert np.max(np.abs(data.R - R)) <= 0.05
        assert np.all(data.sigmaR > 0)

    def test_binomial_error_bar(self):
        U = numerics.haar_unitary(4, numerics.random_source(26))
        C = 10**4
        data = boson.simulate_experiment(U, C, numerics.random_source(27))
        expect = np.sqrt(np.clip(data.R, 1 / C, 1 - 1 / C)
                         * (1 - np.clip(data.R, 1 / C, 1 - 1 / C)) / C)
        assert np.max(np.abs(data.sigmaR - expect)) <= 1e-12

    def test_relative_noise_mode(self):
        U = numerics.haar_unitary(4, numerics.random_source(28))
        data = boson.simulate_experiment(U, None, numerics.random_source(29),
                                         relative_noise=0.05)
        R, _ = boson.theoretical_tensors(U)
        assert np.max(np.abs(data.sigmaR - 0.05 * R)) <= 1e-12


class TestCsv:
    def test_distribution_round_trip(self, tmp_path):
        U = numerics.haar_unitary(3, numerics.random_source(30))
        d = boson.output_distribution(U, fock(1, 1, 0), "quantum")
        path = tmp_path / "dist.csv"
        boson.distribution_to_csv(d, path)
        back = boson.distribution_from_csv(path)
        assert back.space == d.space
        assert np.max(np.abs(back.probs - d.probs)) <= 1e-15

    def test_samples_file(self, tmp_path):
        path = tmp_path / "samples.csv"
        boson.samples_to_csv([fock(1, 0), fock(0, 1)], path)
        assert path.read_text() == "1|0\n0|1\n"
