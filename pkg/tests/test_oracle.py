import numpy as np
import pytest

from pairspace import (
    BodyState,
    CollisionError,
    IntegratorConfig,
    MassSystem,
    PotentialLaw,
    body_accelerations,
    integrate_bodies,
    pairs_to_bodies,
)
from pairspace.central import lagrange_circular_states
from conftest import random_body_state, random_mass_system


class TestBodyAccelerations:
    def test_two_body_unit_case(self):
        ms = MassSystem([1.0, 1.0])
        bodies = BodyState([[0, 0, 0], [1, 0, 0]], np.zeros((2, 3)))
        acc = body_accelerations(bodies, ms, PotentialLaw(1.0))
        np.testing.assert_allclose(acc[0], [1.0, 0, 0], rtol=1e-15)
        np.testing.assert_allclose(acc[1], [-1.0, 0, 0], rtol=1e-15)

    def test_momentum_rate_vanishes(self, rng):
        for _ in range(10):
            ms = random_mass_system(rng, int(rng.integers(2, 7)))
            bodies = random_body_state(rng, ms)
            law = PotentialLaw(float(rng.choice([0.5, 1.0, 2.0])))
            acc = body_accelerations(bodies, ms, law)
            total = ms.masses @ acc
            scale = np.abs(ms.masses[:, None] * acc).max()
            assert np.linalg.norm(total) <= 1e-13 * max(scale, 1e-300)

    def test_equilateral_points_at_centroid(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        law = PotentialLaw(1.0)
        state = lagrange_circular_states(ms, law, 1.0, [0.0])[0]
        bodies = pairs_to_bodies(state, ms)
        acc = body_accelerations(bodies, ms, law)
        mags = np.linalg.norm(acc, axis=1)
        assert np.ptp(mags) <= 1e-13 * mags[0]
        for k in range(3):
            inward = -bodies.r[k] / np.linalg.norm(bodies.r[k])
            cosine = acc[k] @ inward / mags[k]
            assert cosine == pytest.approx(1.0, abs=1e-12)

    def test_collision_raises(self):
        ms = MassSystem([1.0, 1.0, 1.0])
        r = [[0, 0, 0], [1e-14, 0, 0], [1, 0, 0]]
        with pytest.raises(CollisionError):
            body_accelerations(BodyState(r, np.zeros((3, 3))), ms, PotentialLaw(1.0))


class TestIntegrateBodies:
    def _circular(self):
        ms = MassSystem([1.0, 1.0])
        omega = np.sqrt(2.0)  # n=1, M=2, d=1
        r = np.array([[0.5, 0, 0], [-0.5, 0, 0]])
        v = omega * np.cross([0, 0, 1.0], r)
        return ms, BodyState(r, v), 2 * np.pi / omega

    def test_energy_and_momentum_conservation(self):
        ms, bodies, period = self._circular()
        cfg = IntegratorConfig(dt=1e-3 * period, t_end=10 * period, monitor_every=100)
        traj = integrate_bodies(bodies, ms, PotentialLaw(1.0), cfg)
        assert traj.status == "ok"
        e = np.array([s.diagnostics.energy for s in traj.samples])
        assert np.abs(e - e[0]).max() / abs(e[0]) <= 1e-8
        L = np.array([s.diagnostics.angular_momentum for s in traj.samples])
        assert np.abs(L - L[0]).max() / np.abs(L[0]).max() <= 1e-8

    def test_leapfrog_scheme_available(self):
        ms, bodies, period = self._circular()
        cfg = IntegratorConfig(
            dt=1e-3 * period, t_end=period, monitor_every=100, scheme="leapfrog"
        )
        traj = integrate_bodies(bodies, ms, PotentialLaw(1.0), cfg)
        e = np.array([s.diagnostics.energy for s in traj.samples])
        # second-order scheme: looser but bounded drift
        assert np.abs(e - e[0]).max() / abs(e[0]) <= 1e-4

    def test_unknown_scheme_rejected(self):
        ms, bodies, period = self._circular()
        cfg = IntegratorConfig(dt=0.01, t_end=1.0, scheme="rk45")
        with pytest.raises(ValueError):
            integrate_bodies(bodies, ms, PotentialLaw(1.0), cfg)

    def test_collision_gives_partial_trajectory(self):
        ms = MassSystem([1.0, 1.0])
        bodies = BodyState([[0.5, 0, 0], [-0.5, 0, 0]], np.zeros((2, 3)))
        cfg = IntegratorConfig(dt=1e-3, t_end=5.0, monitor_every=10)
        traj = integrate_bodies(bodies, ms, PotentialLaw(1.0), cfg)
        assert traj.status == "collision"
        assert traj.error is not None and len(traj.samples) > 1
