import numpy as np
import pytest
from hypothesis import given, strategies as st

from pairspace import (
    BodyState,
    CollisionError,
    MassSystem,
    PairState,
    PotentialLaw,
    bodies_to_pairs,
    kinetic_energy,
    multiplier_sum_J,
    pair_force_gradient,
    pairs_to_bodies,
    potential_energy,
    triplet_force,
)
from pairspace.central import lagrange_circular_states
from conftest import random_mass_system, random_pair_state


def body_kinetic(state, ms):
    bodies = pairs_to_bodies(state, ms)
    return 0.5 * float(ms.masses @ np.einsum("ij,ij->i", bodies.rdot, bodies.rdot))


def force_scale(state, ms, law):
    d = state.separations()
    return float((law.exponent * ms.pair_mass_product / d ** (law.exponent + 1)).max())


class TestPotentialLaw:
    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan, np.inf])
    def test_rejects_nonpositive_exponent(self, bad):
        with pytest.raises(ValueError):
            PotentialLaw(bad)

    def test_newtonian_default(self):
        assert PotentialLaw().exponent == 1.0


class TestKineticEnergy:
    def test_two_body_example(self):
        ms = MassSystem([1.0, 1.0])
        bodies = BodyState(
            [[0, 0, 0], [1, 0, 0]], [[0, 0, 0], [1.0, 0, 0]]
        )
        state = bodies_to_pairs(bodies, ms)
        np.testing.assert_allclose(state.Rdot, [0.5, 0, 0])
        np.testing.assert_allclose(state.qdot_pair(0, 1), [-1.0, 0, 0])
        assert kinetic_energy(state, ms) == pytest.approx(0.5, rel=1e-14)

    def test_zero_velocities(self, rng):
        ms = random_mass_system(rng, 4)
        state = random_pair_state(rng, ms)
        rest = state.replace(Rdot=np.zeros(3), qdot=np.zeros_like(state.qdot))
        assert kinetic_energy(rest, ms) == 0.0

    def test_matches_body_space_sum(self, rng):
        for n in range(2, 7):
            for _ in range(20):
                ms = random_mass_system(rng, n)
                state = random_pair_state(rng, ms)
                direct = body_kinetic(state, ms)
                assert kinetic_energy(state, ms) == pytest.approx(direct, rel=1e-12)


class TestPairForceGradient:
    def test_unit_example(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        g = pair_force_gradient(np.array([1.0, 0, 0]), 0, 1, ms, PotentialLaw(1.0))
        np.testing.assert_allclose(g, [1.0, 0, 0], rtol=1e-15)

    def test_inverse_cube_example(self):
        # n=2, q=(2,0,0), unit masses: 2*(2,0,0)/2^4 = (0.25,0,0)
        ms = MassSystem([1.0, 1.0])
        g = pair_force_gradient(np.array([2.0, 0, 0]), 0, 1, ms, PotentialLaw(2.0))
        np.testing.assert_allclose(g, [0.25, 0, 0], rtol=1e-15)

    @given(
        n=st.floats(0.25, 4.0),
        qx=st.floats(-2.0, 2.0),
        qy=st.floats(-2.0, 2.0),
        qz=st.floats(-2.0, 2.0),
    )
    def test_odd_in_q(self, n, qx, qy, qz):
        q = np.array([qx, qy, qz])
        if np.linalg.norm(q) < 1e-3:
            return
        ms = MassSystem([2.0, 3.0, 4.0])
        law = PotentialLaw(n)
        g_fwd = pair_force_gradient(q, 0, 2, ms, law)
        g_rev = pair_force_gradient(-q, 2, 0, ms, law)
        np.testing.assert_allclose(g_rev, -g_fwd, rtol=1e-13, atol=1e-300)

    def test_zero_separation_is_collision(self):
        ms = MassSystem([1.0, 1.0])
        with pytest.raises(CollisionError):
            pair_force_gradient(np.zeros(3), 0, 1, ms, PotentialLaw(1.0))


class TestTripletForce:
    def test_equilateral_equal_masses_vanishes(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        for n in (0.5, 1.0, 2.5):
            law = PotentialLaw(n)
            state = lagrange_circular_states(ms, law, 1.0, [0.0])[0]
            F = triplet_force(state, ms, law, 0, 1, 2).value
            assert np.linalg.norm(F) <= 1e-13 * force_scale(state, ms, law)

    def test_antisymmetry(self, rng):
        ms = random_mass_system(rng, 4)
        law = PotentialLaw(1.5)
        state = random_pair_state(rng, ms)
        scale = force_scale(state, ms, law)
        F = triplet_force(state, ms, law, 0, 1, 3).value
        np.testing.assert_allclose(
            triplet_force(state, ms, law, 1, 0, 3).value, -F, atol=1e-12 * scale
        )
        np.testing.assert_allclose(
            triplet_force(state, ms, law, 1, 3, 0).value, F, atol=1e-12 * scale
        )
        np.testing.assert_allclose(
            triplet_force(state, ms, law, 0, 3, 1).value, -F, atol=1e-12 * scale
        )

    def test_quartet_identity(self, rng):
        for _ in range(25):
            ms = random_mass_system(rng, 4)
            law = PotentialLaw(float(rng.choice([0.5, 1.0, 2.0, 3.0])))
            state = random_pair_state(rng, ms)
            lhs = triplet_force(state, ms, law, 0, 1, 2).value
            rhs = (
                triplet_force(state, ms, law, 0, 1, 3).value
                + triplet_force(state, ms, law, 1, 2, 3).value
                + triplet_force(state, ms, law, 2, 0, 3).value
            )
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * force_scale(state, ms, law)

    def test_repeated_indices_rejected(self, rng):
        ms = random_mass_system(rng, 3)
        state = random_pair_state(rng, ms)
        with pytest.raises(ValueError):
            triplet_force(state, ms, PotentialLaw(1.0), 0, 1, 1)

    def test_collision_check_is_per_leg(self):
        # bodies 0 and 1 nearly coincide; the (0,2,3) triplet avoids them
        ms = MassSystem([1.0, 1.0, 1.0, 1.0])
        r = np.array([[0, 0, 0], [1e-14, 0, 0], [1.0, 0, 0], [0, 1.0, 0]])
        state = bodies_to_pairs(BodyState(r, np.zeros((4, 3))), ms)
        law = PotentialLaw(1.0)
        triplet_force(state, ms, law, 0, 2, 3)  # fine: no colliding leg
        with pytest.raises(CollisionError):
            triplet_force(state, ms, law, 0, 1, 2)


class TestMultiplierSum:
    def test_two_body_sum_is_empty(self):
        ms = MassSystem([1.0, 2.0])
        state = PairState(np.zeros(3), np.zeros(3), [[1.0, 0, 0]], [[0, 0, 0]])
        np.testing.assert_array_equal(
            multiplier_sum_J(state, ms, PotentialLaw(1.0), 0, 1), np.zeros(3)
        )

    def test_antisymmetric(self, rng):
        ms = random_mass_system(rng, 4)
        law = PotentialLaw(2.0)
        state = random_pair_state(rng, ms)
        J = multiplier_sum_J(state, ms, law, 0, 2)
        np.testing.assert_allclose(
            multiplier_sum_J(state, ms, law, 2, 0), -J, rtol=1e-14
        )

    def test_row_sums_vanish(self, rng):
        for _ in range(10):
            ms = random_mass_system(rng, 5)
            law = PotentialLaw(float(rng.choice([0.5, 1.0, 3.0])))
            state = random_pair_state(rng, ms)
            scale = force_scale(state, ms, law) * ms.pair_mu.max()
            for i in range(5):
                total = sum(
                    multiplier_sum_J(state, ms, law, i, j)
                    for j in range(5)
                    if j != i
                )
                assert np.linalg.norm(total) <= 1e-12 * scale

    def test_triple_relation_recovers_triplet_force(self, rng):
        for _ in range(10):
            ms = random_mass_system(rng, 5)
            law = PotentialLaw(1.0)
            state = random_pair_state(rng, ms)
            i, j, k = 1, 2, 4
            lhs = (
                multiplier_sum_J(state, ms, law, i, j) / ms.mu(i, j)
                + multiplier_sum_J(state, ms, law, j, k) / ms.mu(j, k)
                + multiplier_sum_J(state, ms, law, k, i) / ms.mu(k, i)
            )
            F = triplet_force(state, ms, law, i, j, k).value
            assert np.linalg.norm(lhs - F) <= 1e-12 * force_scale(state, ms, law)


class TestPotentialEnergy:
    def test_simple_value(self):
        ms = MassSystem([1.0, 1.0])
        state = PairState(np.zeros(3), np.zeros(3), [[2.0, 0, 0]], [[0, 0, 0]])
        assert potential_energy(state, ms, PotentialLaw(1.0)) == pytest.approx(-0.5)

    def test_near_collision_raises(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        q = np.array([[1e-14, 0, 0], [1.0, 0, 0], [1.0 - 1e-14, 0, 0]])
        state = PairState(np.zeros(3), np.zeros(3), q, np.zeros((3, 3)))
        with pytest.raises(CollisionError):
            potential_energy(state, ms, PotentialLaw(1.0))
