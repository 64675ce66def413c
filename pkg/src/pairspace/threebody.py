"""Three-body diagnostics: the multiplier vector, pair energies and
angular momenta, conservation classification, and homothety detection.

For N = 3 a single vector phi = J_12 = J_23 = J_31 carries the whole
constraint coupling:

    phi = n (m1 m2 m3 / M) (q_12/q_12^{n+2} + q_23/q_23^{n+2}
                            + q_31/q_31^{n+2}).

Pair indices in this module follow the cyclic ordering (1,2), (2,3),
(3,1): note the reversed third pair, which makes phi symmetric.

Each pair carries an energy e_ij and an angular momentum
L_ij = q_ij x mu_ij qdot_ij.  The total of either is conserved; the
individual L_ij obey dL_ij/dt = q_ij x phi, and their separate
conservation singles out the equilateral and collinear special
solutions.  A motion released from rest that keeps its shape (a
homothety, q_ij(t) = lambda(t) q_ij(0)) can only be one of those.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MassSystem, PairState, _check_counts, length_scale
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    TrajectorySample,
    pair_period_estimates,
    integrate,
)
from .errors import CollisionError
from .kinetics import COLLISION_TOL, PotentialLaw, power_np2

__all__ = [
    "PairEnergies",
    "PairAngularMomenta",
    "HomothetyResult",
    "phi",
    "pair_energies",
    "pair_angular_momenta",
    "conservation_classifier",
    "homothety_check",
    "homothetic_release",
    "CONSERVATION_DRIFT_TOL",
]

# Relative drift below which a pair angular momentum counts as conserved
# over a few dynamical times; set by RK4 truncation at the default step.
CONSERVATION_DRIFT_TOL = 1e-5


def _require_three(state_or_n) -> None:
    n = getattr(state_or_n, "n_bodies", state_or_n)
    if n != 3:
        raise ValueError("this operation is specific to three-body states")


def _collision_guard(state: PairState) -> None:
    d = state.separations()
    worst = int(d.argmin())
    if d[worst] < COLLISION_TOL * d.max():
        raise CollisionError(
            [(0, 1), (0, 2), (1, 2)][worst], d[worst], time=state.time
        )


def _unit_power_vectors(state: PairState, n_exp: float) -> np.ndarray:
    """Rows q_12, q_23, q_31 each divided by |q|^{n+2} (cyclic order)."""
    _collision_guard(state)
    q = np.array([state.q_pair(0, 1), state.q_pair(1, 2), state.q_pair(2, 0)])
    r2 = np.einsum("ij,ij->i", q, q)
    return q / power_np2(r2, n_exp)[:, None]


def phi(state: PairState, ms: MassSystem, law: PotentialLaw) -> np.ndarray:
    """The single three-body multiplier vector.

    Vanishes on equilateral configurations and is parallel to q_12 on
    collinear ones.
    """
    _require_three(state)
    _check_counts(state.n_bodies, ms)
    u = _unit_power_vectors(state, law.exponent)
    m = ms.masses
    return law.exponent * (m[0] * m[1] * m[2] / ms.total_mass) * u.sum(axis=0)


@dataclass(frozen=True)
class PairEnergies:
    """e_ij = mu_ij |qdot_ij|^2 / 2 - M mu_ij / q_ij^n and their sum."""

    e12: float
    e23: float
    e31: float

    @property
    def total(self) -> float:
        return self.e12 + self.e23 + self.e31


def pair_energies(
    state: PairState, ms: MassSystem, law: PotentialLaw
) -> PairEnergies:
    """Per-pair energies; the sum is the conserved internal energy."""
    _require_three(state)
    _check_counts(state.n_bodies, ms)
    _collision_guard(state)
    out = []
    for i, j in [(0, 1), (1, 2), (2, 0)]:
        mu = ms.mu(i, j)
        qd = state.qdot_pair(i, j)
        d = float(np.linalg.norm(state.q_pair(i, j)))
        out.append(0.5 * mu * float(qd @ qd) - ms.total_mass * mu / d**law.exponent)
    return PairEnergies(*out)


@dataclass(frozen=True)
class PairAngularMomenta:
    """L_ij = q_ij x mu_ij qdot_ij and the torques q_ij x phi driving them."""

    L12: np.ndarray
    L23: np.ndarray
    L31: np.ndarray
    torque12: np.ndarray | None = None
    torque23: np.ndarray | None = None
    torque31: np.ndarray | None = None

    @property
    def total(self) -> np.ndarray:
        return self.L12 + self.L23 + self.L31

    def rows(self) -> np.ndarray:
        return np.array([self.L12, self.L23, self.L31])


def pair_angular_momenta(
    state: PairState, ms: MassSystem, law: PotentialLaw | None = None
) -> PairAngularMomenta:
    """The three pair angular momenta, plus instantaneous torques.

    The torques q_ij x phi require the potential law; pass ``law=None``
    to skip them.  The total equals the barycentric body angular momentum.
    """
    _require_three(state)
    _check_counts(state.n_bodies, ms)
    pairs = [(0, 1), (1, 2), (2, 0)]
    L = [
        np.cross(state.q_pair(i, j), state.qdot_pair(i, j)) * ms.mu(i, j)
        for i, j in pairs
    ]
    torques = (None, None, None)
    if law is not None:
        f = phi(state, ms, law)
        torques = tuple(np.cross(state.q_pair(i, j), f) for i, j in pairs)
    return PairAngularMomenta(*L, *torques)


def _samples(traj) -> list[TrajectorySample]:
    return list(getattr(traj, "samples", traj))


def conservation_classifier(
    traj: Trajectory | list[TrajectorySample],
    ms: MassSystem,
    threshold: float = CONSERVATION_DRIFT_TOL,
) -> str:
    """Classify which pair angular momenta stay constant along a run.

    Returns "all_conserved", "one_conserved", or "none_conserved" from
    the per-pair relative drift against ``threshold``.  Two pairs cannot
    drift alone (the total is conserved), so a count of two is reported
    as all conserved.
    """
    samples = _samples(traj)
    if len(samples) < 10:
        raise ValueError("need at least 10 samples to classify conservation")
    _require_three(samples[0].state)
    rows = []
    for s in samples:
        d = s.diagnostics
        if d.angular_momenta is not None:
            rows.append(d.angular_momenta)
        else:
            rows.append(pair_angular_momenta(s.state, ms).rows())
    L = np.array(rows)  # (samples, 3 pairs, 3 components)
    scale = float(np.linalg.norm(L, axis=2).max())
    if scale == 0.0:
        return "all_conserved"
    drift = np.linalg.norm(L - L[0], axis=2).max(axis=0) / scale
    conserved = int((drift <= threshold).sum())
    if conserved >= 2:
        return "all_conserved"
    if conserved == 1:
        return "one_conserved"
    return "none_conserved"


@dataclass(frozen=True)
class HomothetyResult:
    is_homothetic: bool
    lambda_series: np.ndarray
    max_residual: float
    tolerance: float


def homothety_check(
    traj: Trajectory | list[TrajectorySample], tol: float = 1e-5
) -> HomothetyResult:
    """Test whether all pair vectors evolve by a common scalar factor.

    For each sample the best-fit scale lambda(t) is the least-squares
    solution over all pair-vector components; the trajectory is
    homothetic when the worst fit residual stays below
    ``tol * length_scale`` of the initial state.

    Raises:
        ValueError: if any initial pair vector is zero.
    """
    samples = _samples(traj)
    if not samples:
        raise ValueError("empty trajectory")
    q0 = samples[0].state.q
    if not np.all(np.einsum("ij,ij->i", q0, q0) > 0.0):
        raise ValueError("homothety is undefined for zero initial pair vectors")
    norm0 = float((q0 * q0).sum())
    scale = length_scale(samples[0].state)
    lams = np.empty(len(samples))
    worst = 0.0
    for k, s in enumerate(samples):
        lam = float((s.state.q * q0).sum()) / norm0
        lams[k] = lam
        worst = max(worst, float(np.abs(s.state.q - lam * q0).max()))
    return HomothetyResult(
        is_homothetic=bool(worst <= tol * scale),
        lambda_series=lams,
        max_residual=worst,
        tolerance=tol * scale,
    )


def homothetic_release(
    initial: PairState,
    ms: MassSystem,
    law: PotentialLaw,
    cutoff_factor: float = 1e-3,
    steps_per_period: int = 1000,
    max_spans: int = 250,
    monitor_every: int = 10,
) -> Trajectory:
    """Integrate a rest release down to a near-collision cutoff.

    A collapse sweeps through ever-faster timescales, so the run is split
    into fixed-step segments whose step tracks the shortest current pair
    period; each segment is an ordinary fixed-step integration.  Segments
    span a small fraction of the current fastest period (well inside the
    free-fall time from rest, ~0.18 of it) so the step is re-based before
    the collapse outruns it.  The run stops once the minimum separation
    falls below ``cutoff_factor`` times its initial value, or after
    ``max_spans`` segments for motions that do not collapse.
    """
    if not 0.0 < cutoff_factor < 1.0:
        raise ValueError("cutoff_factor must be in (0, 1)")
    state = initial
    stop = cutoff_factor * float(initial.separations().min())
    merged: Trajectory | None = None
    for _ in range(max_spans):
        t_fast = float(pair_period_estimates(state, ms, law).min())
        cfg = IntegratorConfig(
            dt=t_fast / steps_per_period,
            t_end=state.time + 0.05 * t_fast,
            monitor_every=monitor_every,
            stop_min_separation=stop,
        )
        seg = integrate(state, ms, law, cfg)
        if merged is None:
            merged = seg
        else:
            merged.samples.extend(seg.samples[1:])
            merged.warnings.extend(seg.warnings)
            merged.status = seg.status
            merged.error = seg.error
        if seg.status in ("separation-cutoff", "collision"):
            break
        state = seg.final.state
    return merged
