"""Energies, force gradients, and constraint-multiplier sums.

The interaction is the attractive power law v_ij(q) = -m_i m_j / q^n
(G = 1), so grad v_ij = n m_i m_j q_ij / |q_ij|^{n+2}.  The kinetic
energy in pair coordinates carries a correction term over body triplets;
for realizable states it reproduces the plain body-space sum exactly.

The triplet combination F_ijk and the per-pair multiplier sum J_ij are
the quantities that eliminate the constraint forces from the equations
of motion.  J_ij has the closed form

    J_ij / mu_ij = sum_{k != i,j} (m_k / M) F_ijk,

which is used directly; the underlying linear multiplier system is never
solved numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MassSystem, PairState, _check_counts
from .errors import CollisionError

__all__ = [
    "PotentialLaw",
    "TripletForce",
    "kinetic_energy",
    "potential_energy",
    "pair_force_gradient",
    "triplet_force",
    "multiplier_sum_J",
    "COLLISION_TOL",
]

# Separations below this fraction of the largest pair distance are
# treated as collisions instead of returning enormous forces.
COLLISION_TOL = 1e-12


@dataclass(frozen=True)
class PotentialLaw:
    """Exponent n > 0 of the pairwise potential -m_i m_j / r^n.

    Newtonian gravity is ``PotentialLaw(1.0)``.
    """

    exponent: float = 1.0

    def __post_init__(self):
        if not (float(self.exponent) > 0.0 and np.isfinite(self.exponent)):
            raise ValueError("potential exponent must be positive and finite")


@dataclass(frozen=True)
class TripletForce:
    """Antisymmetric triplet force combination F_ijk.

    Swapping any two indices negates the value; cyclic permutations
    preserve it.
    """

    value: np.ndarray
    indices: tuple[int, int, int]


def power_np2(r2, n: float):
    """|q|^{n+2} from the squared norm r2, with fast integer-n paths."""
    if n == 1.0:
        return r2 * np.sqrt(r2)
    if n == 2.0:
        return r2 * r2
    if n == 3.0:
        return r2 * r2 * np.sqrt(r2)
    return r2 ** ((n + 2.0) / 2.0)


def _collision_guard(state: PairState, ms: MassSystem) -> None:
    d = state.separations()
    cutoff = COLLISION_TOL * float(d.max())
    worst = int(d.argmin())
    if d[worst] < cutoff:
        raise CollisionError(ms.pairs[worst], d[worst], time=state.time)


def kinetic_energy(state: PairState, ms: MassSystem) -> float:
    """Total kinetic energy in pair coordinates.

    T = M |Rdot|^2 / 2 + sum_{i<j} mu_ij |qdot_ij|^2 / 2
        - sum_{i<j<k} mu_ijk |qdot_ij + qdot_jk + qdot_ki|^2 / 2.

    For realizable states the triplet sums vanish and T equals the body
    sum of m_i |rdot_i|^2 / 2.
    """
    _check_counts(state.n_bodies, ms)
    T = 0.5 * ms.total_mass * float(state.Rdot @ state.Rdot)
    T += 0.5 * float(
        ms.pair_mu @ np.einsum("ij,ij->i", state.qdot, state.qdot)
    )
    if state.n_bodies >= 3:
        s = state.qdot[ms._trip_ij] + state.qdot[ms._trip_jk] - state.qdot[ms._trip_ik]
        T -= 0.5 * float(ms.triplet_mu @ np.einsum("ij,ij->i", s, s))
    return T


def potential_energy(
    state: PairState, ms: MassSystem, law: PotentialLaw
) -> float:
    """Total potential energy -sum_{i<j} m_i m_j / |q_ij|^n."""
    _check_counts(state.n_bodies, ms)
    _collision_guard(state, ms)
    d = state.separations()
    return -float((ms.pair_mass_product / d**law.exponent).sum())


def pair_force_gradient(
    q: np.ndarray, i: int, j: int, ms: MassSystem, law: PotentialLaw
) -> np.ndarray:
    """Gradient of v_ij with respect to q_ij: n m_i m_j q / |q|^{n+2}.

    Odd in q, so swapping the pair orientation flips the sign.

    Raises:
        CollisionError: for zero separation.
    """
    q = np.asarray(q, dtype=float)
    r2 = float(q @ q)
    if not r2 > 0.0:
        raise CollisionError((i, j), 0.0)
    n = law.exponent
    return n * ms.mu(i, j) * ms.total_mass * q / power_np2(r2, n)


def triplet_force(
    state: PairState,
    ms: MassSystem,
    law: PotentialLaw,
    i: int,
    j: int,
    k: int,
) -> TripletForce:
    """F_ijk = grad v_ij / mu_ij + grad v_jk / mu_jk + grad v_ki / mu_ki.

    The pair orientations follow the index order as written, including
    the reversed (k, i) leg.  Fully antisymmetric under index swaps.
    """
    if len({i, j, k}) != 3:
        raise ValueError("triplet indices must be distinct")
    _check_counts(state.n_bodies, ms)
    cutoff = COLLISION_TOL * float(state.separations().max())
    for a, b in ((i, j), (j, k), (k, i)):
        d = float(np.linalg.norm(state.q_pair(a, b)))
        if d < cutoff:
            raise CollisionError((a, b), d, time=state.time)
    value = (
        pair_force_gradient(state.q_pair(i, j), i, j, ms, law) / ms.mu(i, j)
        + pair_force_gradient(state.q_pair(j, k), j, k, ms, law) / ms.mu(j, k)
        + pair_force_gradient(state.q_pair(k, i), k, i, ms, law) / ms.mu(k, i)
    )
    return TripletForce(value=value, indices=(i, j, k))


def multiplier_sum_J(
    state: PairState, ms: MassSystem, law: PotentialLaw, i: int, j: int
) -> np.ndarray:
    """Closed-form multiplier sum J_ij = mu_ij sum_k (m_k/M) F_ijk.

    The sum runs over all third bodies k distinct from i and j, so it is
    empty (zero) for N = 2.  Antisymmetric: J_ji = -J_ij.
    """
    if i == j:
        raise ValueError("pair indices must be distinct")
    _check_counts(state.n_bodies, ms)
    total = np.zeros(3)
    for k in range(ms.n_bodies):
        if k == i or k == j:
            continue
        total += ms.masses[k] * triplet_force(state, ms, law, i, j, k).value
    return ms.mu(i, j) * total / ms.total_mass
