import numpy as np
import pytest
from hypothesis import given, strategies as st

from pairspace import (
    BodyState,
    ConstraintViolationError,
    DimensionMismatchError,
    MassSystem,
    PairState,
    bodies_to_pairs,
    check_realizable,
    is_realizable,
    length_scale,
    max_triangle_residual,
    pairs_to_bodies,
    triangle_residual,
    triangle_residuals,
)
from conftest import random_body_state, random_mass_system, random_pair_state

masses_strategy = st.lists(
    st.floats(0.05, 50.0, allow_nan=False), min_size=2, max_size=6
)


class TestMassSystem:
    def test_two_body_values(self):
        ms = MassSystem([1.0, 3.0])
        assert ms.total_mass == 4.0
        assert ms.mu(0, 1) == pytest.approx(0.75)
        assert ms.pairs == [(0, 1)]

    @given(masses=masses_strategy)
    def test_reduced_masses_match_definitions(self, masses):
        ms = MassSystem(masses)
        M = sum(masses)
        for i, j in ms.pairs:
            assert ms.mu(i, j) == pytest.approx(masses[i] * masses[j] / M, rel=1e-15)
            assert ms.mu(j, i) == ms.mu(i, j)
        for i, j, k in ms.triplets:
            expect = masses[i] * masses[j] * masses[k] / M**2
            assert ms.mu3(i, j, k) == pytest.approx(expect, rel=1e-15)
            assert ms.mu3(k, i, j) == ms.mu3(i, j, k)
            assert ms.mu3(j, i, k) == ms.mu3(i, j, k)

    @pytest.mark.parametrize("bad", [[], [1.0], [1.0, -2.0], [1.0, 0.0], [1.0, np.nan]])
    def test_rejects_bad_masses(self, bad):
        with pytest.raises(ValueError):
            MassSystem(bad)

    def test_arrays_are_readonly(self):
        ms = MassSystem([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            ms.masses[0] = 5.0


class TestPairStateBasics:
    def test_orientation_and_diagonal(self, rng):
        ms = random_mass_system(rng, 4)
        state = random_pair_state(rng, ms)
        np.testing.assert_array_equal(state.q_pair(2, 0), -state.q_pair(0, 2))
        np.testing.assert_array_equal(state.q_pair(1, 1), np.zeros(3))
        np.testing.assert_array_equal(state.qdot_pair(3, 1), -state.qdot_pair(1, 3))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            PairState(np.zeros(3), np.zeros(3), [[np.inf, 0, 0]], [[0, 0, 0]])

    def test_rejects_impossible_pair_count(self):
        q = np.zeros((2, 3))
        with pytest.raises(ValueError):
            PairState(np.zeros(3), np.zeros(3), q, q)

    def test_immutable(self, rng):
        state = random_pair_state(rng, random_mass_system(rng, 3))
        with pytest.raises(ValueError):
            state.q[0, 0] = 1.0


class TestBodiesToPairs:
    def test_two_body_example(self):
        ms = MassSystem([1.0, 1.0])
        bodies = BodyState([[0, 0, 0], [1, 0, 0]], np.zeros((2, 3)))
        state = bodies_to_pairs(bodies, ms)
        np.testing.assert_allclose(state.q_pair(0, 1), [-1.0, 0.0, 0.0])
        np.testing.assert_allclose(state.R, [0.5, 0.0, 0.0])

    def test_output_realizable_by_construction(self, rng):
        for n in range(3, 7):
            ms = random_mass_system(rng, n)
            state = random_pair_state(rng, ms)
            assert max_triangle_residual(state) <= 1e-14 * length_scale(state)

    def test_dimension_mismatch(self, rng):
        ms = random_mass_system(rng, 3)
        bodies = random_body_state(rng, random_mass_system(rng, 4))
        with pytest.raises(DimensionMismatchError):
            bodies_to_pairs(bodies, ms)


class TestPairsToBodies:
    def test_two_body_inverse_example(self):
        ms = MassSystem([1.0, 1.0])
        state = PairState([0.5, 0, 0], np.zeros(3), [[-1.0, 0, 0]], [[0, 0, 0]])
        bodies = pairs_to_bodies(state, ms)
        np.testing.assert_allclose(bodies.r[0], [0.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(bodies.r[1], [1.0, 0.0, 0.0], atol=1e-15)

    def test_zero_R_gives_barycentric_bodies(self, rng):
        ms = random_mass_system(rng, 3)
        state = random_pair_state(rng, ms)
        state = state.replace(R=np.zeros(3), Rdot=np.zeros(3))
        bodies = pairs_to_bodies(state, ms)
        com = ms.masses @ bodies.r
        assert np.linalg.norm(com) <= 1e-13 * ms.total_mass * length_scale(state)

    def test_round_trip_bodies_pairs_bodies(self, rng):
        for n in range(2, 7):
            ms = random_mass_system(rng, n)
            bodies = random_body_state(rng, ms)
            back = pairs_to_bodies(bodies_to_pairs(bodies, ms), ms)
            scale = np.abs(bodies.r).max()
            assert np.abs(back.r - bodies.r).max() <= 1e-12 * scale
            assert np.abs(back.rdot - bodies.rdot).max() <= 1e-12 * max(
                np.abs(bodies.rdot).max(), 1e-300
            )

    def test_round_trip_pairs_bodies_pairs(self, rng):
        for n in range(2, 7):
            ms = random_mass_system(rng, n)
            state = random_pair_state(rng, ms)
            back = bodies_to_pairs(pairs_to_bodies(state, ms), ms)
            scale = length_scale(state)
            assert np.abs(back.q - state.q).max() <= 1e-12 * scale
            np.testing.assert_allclose(back.R, state.R, atol=1e-13 * scale)

    def test_broken_triangle_rejected_with_worst_triplet(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        # q_12 + q_23 + q_31 = (0.1, 0, 0)
        q = np.array([[1.0, 0, 0], [2.0, 0, 0], [1.1, 0, 0]])
        state = PairState(np.zeros(3), np.zeros(3), q, np.zeros((3, 3)))
        with pytest.raises(ConstraintViolationError) as err:
            pairs_to_bodies(state, ms)
        assert err.value.triplet == (0, 1, 2)
        assert err.value.residual == pytest.approx(0.1)


class TestTriangleResidual:
    def test_realizable_state_is_small(self, rng):
        ms = random_mass_system(rng, 5)
        state = random_pair_state(rng, ms)
        assert np.all(triangle_residuals(state) <= 1e-13 * length_scale(state))

    def test_orientation_consistency(self, rng):
        ms = random_mass_system(rng, 4)
        state = random_pair_state(rng, ms)
        r_ijk = triangle_residual(state, 0, 1, 2)
        r_jik = triangle_residual(state, 1, 0, 2)
        # both are sums of oriented pair vectors; swapping two indices
        # reverses every leg, so the residuals are negatives
        np.testing.assert_allclose(r_jik, -r_ijk, atol=1e-15)

    def test_repeated_indices_rejected(self, rng):
        state = random_pair_state(rng, random_mass_system(rng, 3))
        with pytest.raises(ValueError):
            triangle_residual(state, 0, 0, 1)

    def test_is_realizable_predicate(self, rng):
        ms = random_mass_system(rng, 3)
        state = random_pair_state(rng, ms)
        assert is_realizable(state)
        q = np.array(state.q)
        q[0] += [0.2, 0.0, 0.0]
        assert not is_realizable(state.replace(q=q))

    def test_check_realizable_accepts_n2(self):
        ms = MassSystem([1.0, 2.0])
        state = PairState(np.zeros(3), np.zeros(3), [[1, 0, 0]], [[0, 0, 0]])
        check_realizable(state)  # no triplets, nothing to violate
        assert max_triangle_residual(state) == 0.0
