import numpy as np
import pytest
from hypothesis import settings

from pairspace import BodyState, MassSystem, PotentialLaw, bodies_to_pairs

settings.register_profile(
    "suite", max_examples=30, deadline=None, derandomize=True
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_mass_system(rng, n=3, lo=0.2, hi=5.0):
    return MassSystem(rng.uniform(lo, hi, size=n))


def random_body_state(rng, ms, min_separation=0.15, v_scale=0.5):
    """Bodies in the unit box with separations bounded away from zero."""
    n = ms.n_bodies
    while True:
        r = rng.uniform(-1.0, 1.0, size=(n, 3))
        d = r[ms._idx_i] - r[ms._idx_j]
        if np.sqrt(np.einsum("ij,ij->i", d, d)).min() > min_separation:
            break
    v = v_scale * rng.standard_normal((n, 3))
    return BodyState(r, v)


def random_pair_state(rng, ms, **kw):
    return bodies_to_pairs(random_body_state(rng, ms, **kw), ms)


def warm_body_state(rng, ms, min_separation=0.6, spin=0.85, noise=0.15):
    """Random state given near-circular support against collapse.

    Bodies get the velocity of a rigid rotation at roughly the orbital
    rate for their spread, plus a small random component; such states
    shear instead of free-falling, so short integrations stay clear of
    close encounters.
    """
    n = ms.n_bodies
    while True:
        r = rng.uniform(-1.0, 1.0, size=(n, 3))
        r[:, 2] *= 0.2
        d = r[ms._idx_i] - r[ms._idx_j]
        if np.sqrt(np.einsum("ij,ij->i", d, d)).min() > min_separation:
            break
    com = ms.masses @ r / ms.total_mass
    radius = float(np.sqrt(((r - com) ** 2).sum(axis=1)).mean())
    omega = spin * np.sqrt(ms.total_mass / radius**3)
    v = omega * np.cross([0.0, 0.0, 1.0], r - com)
    v += noise * omega * radius * rng.standard_normal((n, 3))
    return BodyState(r, v)


def warm_pair_state(rng, ms, **kw):
    return bodies_to_pairs(warm_body_state(rng, ms, **kw), ms)


def circular_two_body_state(ms, law, separation=1.0):
    """Two bodies on the circular orbit of their relative motion."""
    assert ms.n_bodies == 2
    n = law.exponent
    omega = np.sqrt(n * ms.total_mass / separation ** (n + 2.0))
    m1, m2 = ms.masses
    r = np.array([
        [separation * m2 / ms.total_mass, 0.0, 0.0],
        [-separation * m1 / ms.total_mass, 0.0, 0.0],
    ])
    v = omega * np.cross([0.0, 0.0, 1.0], r)
    return bodies_to_pairs(BodyState(r, v), ms)


def newtonian():
    return PotentialLaw(1.0)
