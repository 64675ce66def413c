"""Pair-coordinate representation of N-body states.

A system of N bodies is described either by barycentric positions r_i
(:class:`BodyState`) or by the center of mass R together with all
N(N-1)/2 relative vectors q_ij = r_i - r_j (:class:`PairState`).  Pair
vectors are stored only for i < j; access with swapped indices flips the
sign, and q_ii is the zero vector.  A pair state is *realizable* when
every triplet satisfies the triangle condition q_ij + q_jk + q_ki = 0,
which is exactly the condition for a configuration of bodies to exist.

All state objects are immutable after construction (their arrays are
marked read-only), so they can be shared freely across threads.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConstraintViolationError, DimensionMismatchError

__all__ = [
    "MassSystem",
    "PairState",
    "BodyState",
    "pair_index_list",
    "bodies_to_pairs",
    "pairs_to_bodies",
    "triangle_residual",
    "triangle_residuals",
    "velocity_triangle_residuals",
    "length_scale",
    "max_triangle_residual",
    "is_realizable",
    "check_realizable",
    "DEFAULT_TRIANGLE_TOL",
]

# Relative triangle tolerance (times the largest pair distance).  Chosen
# loose enough that integrator round-off never trips it, tight enough to
# catch genuinely inconsistent input.
DEFAULT_TRIANGLE_TOL = 1e-9


def pair_index_list(n_bodies: int) -> list[tuple[int, int]]:
    """Canonical pair ordering: (0,1), (0,2), ..., (n-2,n-1)."""
    return [(i, j) for i in range(n_bodies) for j in range(i + 1, n_bodies)]


@lru_cache(maxsize=None)
def _pair_positions(n_bodies: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pair_index_list(n_bodies))}


@lru_cache(maxsize=None)
def _triplet_rows(n_bodies: int):
    """Triplets (i<j<k) and the pair rows entering q_ij + q_jk - q_ik."""
    pos = _pair_positions(n_bodies)
    trips = list(combinations(range(n_bodies), 3))
    ij = np.array([pos[(i, j)] for i, j, k in trips], dtype=int)
    jk = np.array([pos[(j, k)] for i, j, k in trips], dtype=int)
    ik = np.array([pos[(i, k)] for i, j, k in trips], dtype=int)
    return trips, ij, jk, ik


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("state components must be finite")
    a.setflags(write=False)
    return a


class MassSystem:
    """Masses of an N-body system with cached reduced-mass bookkeeping.

    Attributes:
        masses: array of the N body masses, all strictly positive.
        n_bodies: N (at least 2).
        total_mass: M = sum of masses.
        pairs: canonical (i, j) index pairs with i < j.
        pair_mu: reduced mass m_i m_j / M per canonical pair.
        triplets: canonical (i, j, k) index triplets with i < j < k.
        triplet_mu: reduced mass m_i m_j m_k / M^2 per canonical triplet.
    """

    def __init__(self, masses: Sequence[float]):
        m = np.array(masses, dtype=float)
        if m.ndim != 1 or m.size < 2:
            raise ValueError("need at least two masses")
        if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
            raise ValueError("all masses must be positive and finite")
        m.setflags(write=False)
        self.masses = m
        self.n_bodies = int(m.size)
        self.total_mass = float(m.sum())
        self.pairs = pair_index_list(self.n_bodies)
        self.n_pairs = len(self.pairs)

        self._idx_i = np.array([p[0] for p in self.pairs])
        self._idx_j = np.array([p[1] for p in self.pairs])
        self.pair_mu = _readonly(m[self._idx_i] * m[self._idx_j] / self.total_mass)
        self.pair_mass_product = _readonly(m[self._idx_i] * m[self._idx_j])

        self.triplets, self._trip_ij, self._trip_jk, self._trip_ik = _triplet_rows(
            self.n_bodies
        )
        self.triplet_mu = _readonly(
            [m[i] * m[j] * m[k] / self.total_mass**2 for i, j, k in self.triplets]
        )

        # Signed-mass matrix for weighted pair sums: (W @ q)[i] equals
        # sum_j m_j q_ij, used by both pairs_to_bodies and the equations
        # of motion.
        W = np.zeros((self.n_bodies, self.n_pairs))
        for p, (a, b) in enumerate(self.pairs):
            W[a, p] = m[b]
            W[b, p] = -m[a]
        self._weight = _readonly(W)

    def pair_position(self, i: int, j: int) -> int:
        """Row of pair (i, j) (any order, i != j) in the canonical layout."""
        if i == j:
            raise ValueError("pair indices must be distinct")
        return _pair_positions(self.n_bodies)[(i, j) if i < j else (j, i)]

    def mu(self, i: int, j: int) -> float:
        """Pair reduced mass m_i m_j / M (symmetric in i, j)."""
        return float(self.masses[i] * self.masses[j] / self.total_mass)

    def mu3(self, i: int, j: int, k: int) -> float:
        """Triplet reduced mass m_i m_j m_k / M^2 (symmetric in all indices)."""
        a, b, c = sorted((i, j, k))  # fixed product order keeps it exact
        m = self.masses
        return float(m[a] * m[b] * m[c] / self.total_mass**2)

    def __repr__(self):
        return f"MassSystem({self.masses.tolist()})"


class PairState:
    """Center of mass plus all pairwise relative vectors and their rates.

    Args:
        R, Rdot: center-of-mass position and velocity, shape (3,).
        q, qdot: pair vectors and velocities, shape (P, 3) in the
            canonical pair order of :func:`pair_index_list`.
        time: simulation time the state belongs to.
    """

    def __init__(self, R, Rdot, q, qdot, time: float = 0.0):
        self.R = _readonly(R)
        self.Rdot = _readonly(Rdot)
        self.q = _readonly(np.atleast_2d(q))
        self.qdot = _readonly(np.atleast_2d(qdot))
        self.time = float(time)
        if self.R.shape != (3,) or self.Rdot.shape != (3,):
            raise ValueError("R and Rdot must have shape (3,)")
        if self.q.shape != self.qdot.shape or self.q.shape[1] != 3:
            raise ValueError("q and qdot must both have shape (P, 3)")
        p = self.q.shape[0]
        n = int(round((1 + np.sqrt(1 + 8 * p)) / 2))
        if n * (n - 1) // 2 != p:
            raise ValueError(f"{p} pair vectors do not match any body count")
        self.n_bodies = n

    @property
    def n_pairs(self) -> int:
        return self.q.shape[0]

    def _row(self, i: int, j: int) -> tuple[int, float]:
        if i == j:
            raise ValueError("pair indices must be distinct")
        if i < j:
            return _pair_positions(self.n_bodies)[(i, j)], 1.0
        return _pair_positions(self.n_bodies)[(j, i)], -1.0

    def q_pair(self, i: int, j: int) -> np.ndarray:
        """q_ij for any index order; q_ji = -q_ij and q_ii = 0."""
        if i == j:
            return np.zeros(3)
        row, sign = self._row(i, j)
        return sign * self.q[row]

    def qdot_pair(self, i: int, j: int) -> np.ndarray:
        """d/dt q_ij for any index order."""
        if i == j:
            return np.zeros(3)
        row, sign = self._row(i, j)
        return sign * self.qdot[row]

    def separations(self) -> np.ndarray:
        """Distances |q_ij| per canonical pair."""
        return np.sqrt(np.einsum("ij,ij->i", self.q, self.q))

    def replace(self, **kw) -> "PairState":
        fields = dict(R=self.R, Rdot=self.Rdot, q=self.q, qdot=self.qdot,
                      time=self.time)
        fields.update(kw)
        return PairState(**fields)

    def __repr__(self):
        return f"PairState(n_bodies={self.n_bodies}, time={self.time!r})"


class BodyState:
    """Positions and velocities of N bodies in ordinary coordinates."""

    def __init__(self, r, rdot, time: float = 0.0):
        self.r = _readonly(np.atleast_2d(r))
        self.rdot = _readonly(np.atleast_2d(rdot))
        self.time = float(time)
        if self.r.shape != self.rdot.shape or self.r.shape[1] != 3:
            raise ValueError("r and rdot must both have shape (N, 3)")
        if self.r.shape[0] < 2:
            raise ValueError("need at least two bodies")
        self.n_bodies = self.r.shape[0]

    def __repr__(self):
        return f"BodyState(n_bodies={self.n_bodies}, time={self.time!r})"


def _check_counts(n_state: int, ms: MassSystem) -> None:
    if n_state != ms.n_bodies:
        raise DimensionMismatchError(
            f"state has {n_state} bodies but mass system has {ms.n_bodies}"
        )


def bodies_to_pairs(bodies: BodyState, ms: MassSystem) -> PairState:
    """Map body coordinates to the pair representation.

    q_ij = r_i - r_j for every i < j, R is the center of mass, and the
    same linear maps are applied to the velocities.  The result satisfies
    every triangle condition exactly (up to rounding) by construction.
    """
    _check_counts(bodies.n_bodies, ms)
    m = ms.masses
    R = m @ bodies.r / ms.total_mass
    Rdot = m @ bodies.rdot / ms.total_mass
    q = bodies.r[ms._idx_i] - bodies.r[ms._idx_j]
    qdot = bodies.rdot[ms._idx_i] - bodies.rdot[ms._idx_j]
    return PairState(R, Rdot, q, qdot, time=bodies.time)


def pairs_to_bodies(
    state: PairState,
    ms: MassSystem,
    tol_triangle: float = DEFAULT_TRIANGLE_TOL,
) -> BodyState:
    """Recover body coordinates: r_i = R + sum_j (m_j/M) q_ij.

    Args:
        state: a realizable pair state.
        ms: matching mass system.
        tol_triangle: relative triangle tolerance (times the largest pair
            distance) the input must satisfy.

    Raises:
        ConstraintViolationError: if any triangle residual exceeds the
            tolerance; the error carries the worst offending triplet.
    """
    _check_counts(state.n_bodies, ms)
    check_realizable(state, tol_triangle)
    r = state.R + (ms._weight @ state.q) / ms.total_mass
    rdot = state.Rdot + (ms._weight @ state.qdot) / ms.total_mass
    return BodyState(r, rdot, time=state.time)


def triangle_residual(state: PairState, i: int, j: int, k: int) -> np.ndarray:
    """q_ij + q_jk + q_ki for distinct body indices (any order)."""
    if len({i, j, k}) != 3:
        raise ValueError("triangle indices must be distinct")
    return state.q_pair(i, j) + state.q_pair(j, k) + state.q_pair(k, i)


def _triplet_norms(a: np.ndarray, n_bodies: int) -> np.ndarray:
    _, ij, jk, ik = _triplet_rows(n_bodies)
    s = a[ij] + a[jk] - a[ik]
    return np.sqrt(np.einsum("ij,ij->i", s, s))


def triangle_residuals(state: PairState) -> np.ndarray:
    """Norms of q_ij + q_jk + q_ki for every canonical triplet i < j < k."""
    return _triplet_norms(state.q, state.n_bodies)


def velocity_triangle_residuals(state: PairState) -> np.ndarray:
    """Norms of the velocity triangle sums, one per canonical triplet."""
    return _triplet_norms(state.qdot, state.n_bodies)


def length_scale(state: PairState) -> float:
    """Largest pair distance; the reference scale for relative tolerances."""
    return float(state.separations().max())


def max_triangle_residual(state: PairState) -> float:
    """Worst triangle residual over all triplets (0.0 for N = 2)."""
    if state.n_bodies < 3:
        return 0.0
    return float(triangle_residuals(state).max())


def is_realizable(
    state: PairState, tol_triangle: float = DEFAULT_TRIANGLE_TOL
) -> bool:
    """Whether all triangle conditions hold within the relative tolerance."""
    try:
        check_realizable(state, tol_triangle)
    except ConstraintViolationError:
        return False
    return True


def check_realizable(
    state: PairState,
    tol_triangle: float = DEFAULT_TRIANGLE_TOL,
    velocities: bool = False,
) -> None:
    """Raise ConstraintViolationError unless all triangle conditions hold.

    The tolerance is relative: residuals are compared against
    ``tol_triangle * length_scale(state)``.  With ``velocities=True`` the
    velocity sums are checked as well, against the same absolute cutoff
    scaled by the largest pair speed.  N = 2 states are always realizable.
    """
    n = state.n_bodies
    if n < 3:
        return
    trips, _, _, _ = _triplet_rows(n)
    res = triangle_residuals(state)
    tol_abs = tol_triangle * length_scale(state)
    worst = int(res.argmax())
    if res[worst] > tol_abs:
        raise ConstraintViolationError(trips[worst], res[worst], tol_abs)
    if velocities:
        vres = velocity_triangle_residuals(state)
        vscale = float(
            np.sqrt(np.einsum("ij,ij->i", state.qdot, state.qdot)).max()
        )
        vtol = tol_triangle * max(vscale, 1e-300)
        worst = int(vres.argmax())
        if vres[worst] > vtol:
            raise ConstraintViolationError(trips[worst], vres[worst], vtol)
