"""Time integration of the pair-coordinate equations of motion.

The second-order system integrated here is

    qddot_ij = (J_ij - grad v_ij) / mu_ij,        Rddot = 0,

with J_ij the closed-form multiplier sum.  For the r^-n interaction the
right-hand side reduces algebraically to

    qddot_ij = n (S_j - S_i),   S_i = sum_a m_a q_ia / |q_ia|^{n+2},

which is what the inner loop evaluates (tests pin its agreement with the
literal J-form).  The center of mass decouples exactly, so R is advanced
analytically as R(t) = R(0) + t Rdot(0).

Triangle conditions are monitored, never re-projected: because the
acceleration sums over any triplet cancel identically, a Runge-Kutta
step preserves the constraints to rounding, and residual growth is a
correctness signal rather than expected discretization drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TRIANGLE_TOL,
    MassSystem,
    PairState,
    _check_counts,
    check_realizable,
    max_triangle_residual,
)
from .errors import CollisionError
from .kinetics import (
    COLLISION_TOL,
    PotentialLaw,
    kinetic_energy,
    potential_energy,
    power_np2,
)

__all__ = [
    "IntegratorConfig",
    "Diagnostics",
    "TrajectorySample",
    "Trajectory",
    "pair_accelerations",
    "pair_period_estimates",
    "default_timestep",
    "integrate",
]

# Monitored residual above this multiple of the triangle tolerance flags
# the run (it keeps going; the flag is the signal).
DRIFT_WARNING_FACTOR = 1e3


@dataclass
class IntegratorConfig:
    """Fixed-step integration parameters.

    Args:
        dt: step size (> 0).  The actual step is adjusted down slightly
            so an integer number of steps lands exactly on t_end.
        t_end: final time (must exceed the initial state's time).
        scheme: integration scheme; this module implements "rk4".
        monitor_every: record a sample every this many steps (the final
            state is always recorded).
        tol_triangle: relative triangle tolerance used for the initial
            realizability check and drift monitoring.
        stop_min_separation: optional absolute separation; the run halts
            cleanly once any pair gets closer than this (used for
            near-collision cutoffs, distinct from the collision error).
    """

    dt: float
    t_end: float
    scheme: str = "rk4"
    monitor_every: int = 10
    tol_triangle: float = DEFAULT_TRIANGLE_TOL
    stop_min_separation: float | None = None

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.monitor_every < 1:
            raise ValueError("monitor_every must be at least 1")


@dataclass(frozen=True)
class Diagnostics:
    """Per-sample conserved-quantity report, computed from the stored state.

    ``pair_energy`` is the internal energy T - M|Rdot|^2/2 + V, the
    quantity conserved by the pair equations of motion.
    ``angular_momenta`` holds the rows (L_12, L_23, L_31) for three-body
    states and is None otherwise.
    """

    kinetic: float
    potential: float
    pair_energy: float
    triangle_residual: float
    angular_momenta: np.ndarray | None = None


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    state: PairState
    diagnostics: Diagnostics


@dataclass
class Trajectory:
    """Ordered samples plus the run outcome.

    ``status`` is "ok", "triangle-drift" (residual exceeded the warning
    level but the run completed), "separation-cutoff" (stopped at the
    configured minimum separation), or "collision" (stopped with
    ``error`` holding the CollisionError and the samples collected up to
    that point).
    """

    samples: list[TrajectorySample]
    status: str = "ok"
    warnings: list[str] = field(default_factory=list)
    error: CollisionError | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    @property
    def states(self) -> list[PairState]:
        return [s.state for s in self.samples]

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]

    def __len__(self):
        return len(self.samples)


def _unresolved_pair(d2_prev: np.ndarray, d2_new: np.ndarray) -> int | None:
    """Pair index whose distance changed more than 2x within one step.

    A resolved step moves separations by a small fraction; a jump past
    this factor means the continuous solution passed through (or near)
    a singularity inside the step, which no fixed step can represent.
    NaNs from a blown-up step also land here.
    """
    with np.errstate(invalid="ignore"):
        ok = (d2_new > 0.25 * d2_prev) & (d2_new < 4.0 * d2_prev)
    if ok.all():
        return None
    return int(np.argmin(ok))


def _raw_accelerations(q: np.ndarray, ms: MassSystem, n_exp: float) -> np.ndarray:
    """Accelerations for the (P, 3) pair-vector block; collision-guarded."""
    r2 = np.einsum("ij,ij->i", q, q)
    worst = int(r2.argmin())
    if r2[worst] < (COLLISION_TOL**2) * r2.max():
        raise CollisionError(ms.pairs[worst], math.sqrt(r2[worst]))
    u = q / power_np2(r2, n_exp)[:, None]
    S = ms._weight @ u
    return n_exp * (S[ms._idx_j] - S[ms._idx_i])


def pair_accelerations(
    state: PairState,
    ms: MassSystem,
    law: PotentialLaw,
    tol_triangle: float = DEFAULT_TRIANGLE_TOL,
) -> np.ndarray:
    """qddot_ij = (J_ij - grad v_ij) / mu_ij for every canonical pair.

    The sum of the returned rows over any triplet (with orientation
    signs) cancels identically, mirroring the constraint structure.

    Raises:
        ConstraintViolationError: if the state is not realizable.
        CollisionError: if any separation is below the collision cutoff.
    """
    _check_counts(state.n_bodies, ms)
    check_realizable(state, tol_triangle)
    try:
        return _raw_accelerations(state.q, ms, law.exponent)
    except CollisionError as exc:
        raise CollisionError(exc.pair, exc.separation, time=state.time) from None


def pair_period_estimates(
    state: PairState, ms: MassSystem, law: PotentialLaw
) -> np.ndarray:
    """Two-body circular-orbit period per pair: 2 pi sqrt(q^{n+2} / (n M)).

    Each pair equation decouples to qddot = -n M q / q^{n+2} when the
    multiplier term vanishes, so this is the natural timescale of the
    fastest pair.
    """
    _check_counts(state.n_bodies, ms)
    d2 = np.einsum("ij,ij->i", state.q, state.q)
    return 2.0 * np.pi * np.sqrt(
        power_np2(d2, law.exponent) / (law.exponent * ms.total_mass)
    )


def default_timestep(
    state: PairState, ms: MassSystem, law: PotentialLaw
) -> float:
    """1e-3 times the shortest pair period estimate."""
    return 1e-3 * float(pair_period_estimates(state, ms, law).min())


def _diagnostics(state: PairState, ms: MassSystem, law: PotentialLaw) -> Diagnostics:
    T = kinetic_energy(state, ms)
    V = potential_energy(state, ms, law)
    E_pair = T - 0.5 * ms.total_mass * float(state.Rdot @ state.Rdot) + V
    ang = None
    if state.n_bodies == 3:
        L = np.cross(state.q, state.qdot) * ms.pair_mu[:, None]
        # canonical rows (01),(02),(12) -> display order L_12, L_23, L_31
        ang = L[[0, 2, 1]]
        ang.setflags(write=False)
    return Diagnostics(
        kinetic=T,
        potential=V,
        pair_energy=E_pair,
        triangle_residual=max_triangle_residual(state),
        angular_momenta=ang,
    )


def integrate(
    initial: PairState,
    ms: MassSystem,
    law: PotentialLaw,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Propagate a realizable pair state to cfg.t_end with classical RK4.

    Both the position and velocity triangle conditions must hold at the
    initial time; together they guarantee the constraints stay satisfied
    along the continuous flow, so any monitored growth is numerical.

    Returns a :class:`Trajectory`; a mid-run collision yields the partial
    trajectory with ``status="collision"`` and the error attached rather
    than raising.
    """
    _check_counts(initial.n_bodies, ms)
    if cfg.scheme != "rk4":
        raise ValueError(f"unsupported scheme {cfg.scheme!r}")
    if not cfg.t_end > initial.time:
        raise ValueError("t_end must exceed the initial state's time")
    check_realizable(initial, cfg.tol_triangle, velocities=True)

    t0 = initial.time
    span = cfg.t_end - t0
    n_steps = max(1, math.ceil(span / cfg.dt - 1e-12))
    h = span / n_steps
    n_exp = law.exponent
    R0, Rdot = initial.R, initial.Rdot

    q = np.array(initial.q, dtype=float)
    v = np.array(initial.qdot, dtype=float)

    drift_limit = DRIFT_WARNING_FACTOR * cfg.tol_triangle
    traj = Trajectory(samples=[])

    def record(step: int) -> None:
        t = t0 + step * h
        state = PairState(R0 + (t - t0) * Rdot, Rdot, q, v, time=t)
        diag = _diagnostics(state, ms, law)
        traj.samples.append(TrajectorySample(time=t, state=state, diagnostics=diag))
        scale = max(float(state.separations().max()), 1e-300)
        if diag.triangle_residual > drift_limit * scale and not traj.warnings:
            traj.warnings.append(
                f"triangle residual {diag.triangle_residual:.3e} exceeded "
                f"{DRIFT_WARNING_FACTOR:g} x tolerance at t={t:.6g}"
            )
            traj.status = "triangle-drift"

    record(0)
    stop_r2 = None
    if cfg.stop_min_separation is not None:
        stop_r2 = float(cfg.stop_min_separation) ** 2
    d2_prev = np.einsum("ij,ij->i", q, q)

    for step in range(1, n_steps + 1):
        try:
            a1 = _raw_accelerations(q, ms, n_exp)
            q2 = q + (0.5 * h) * v
            v2 = v + (0.5 * h) * a1
            a2 = _raw_accelerations(q2, ms, n_exp)
            q3 = q + (0.5 * h) * v2
            v3 = v + (0.5 * h) * a2
            a3 = _raw_accelerations(q3, ms, n_exp)
            q4 = q + h * v3
            v4 = v + h * a3
            a4 = _raw_accelerations(q4, ms, n_exp)
            q_new = q + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v_new = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            d2_new = np.einsum("ij,ij->i", q_new, q_new)
            bad = _unresolved_pair(d2_prev, d2_new)
            if bad is not None:
                raise CollisionError(ms.pairs[bad], math.sqrt(max(d2_new[bad], 0.0)))
        except CollisionError as exc:
            traj.error = CollisionError(
                exc.pair, exc.separation, time=t0 + (step - 1) * h
            )
            traj.status = "collision"
            if traj.samples[-1].time < t0 + (step - 1) * h:
                record(step - 1)
            return traj
        q, v, d2_prev = q_new, v_new, d2_new

        if step == n_steps or step % cfg.monitor_every == 0:
            record(step)
        if stop_r2 is not None and float(d2_new.min()) < stop_r2:
            if traj.samples[-1].time < t0 + step * h:
                record(step)
            traj.status = "separation-cutoff"
            return traj

    return traj
