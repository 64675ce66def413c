"""Independent body-coordinate integrator used for cross-validation.

Plain Newtonian form: m_i rddot_i = -sum_{j != i} n m_i m_j
(r_i - r_j) / |r_i - r_j|^{n+2}.  The scheme and step layout mirror the
pair-coordinate integrator so that any disagreement between the two
isolates formulation errors rather than scheme differences.  A leapfrog
(kick-drift-kick) scheme is also available for scheme-independent spot
checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BodyState, MassSystem, _check_counts
from .dynamics import IntegratorConfig, _unresolved_pair
from .errors import CollisionError
from .kinetics import COLLISION_TOL, PotentialLaw, power_np2

__all__ = [
    "BodyDiagnostics",
    "BodySample",
    "BodyTrajectory",
    "body_accelerations",
    "integrate_bodies",
]


@dataclass(frozen=True)
class BodyDiagnostics:
    kinetic: float
    potential: float
    energy: float
    angular_momentum: np.ndarray  # total sum r x m rdot, shape (3,)


@dataclass(frozen=True)
class BodySample:
    time: float
    state: BodyState
    diagnostics: BodyDiagnostics


@dataclass
class BodyTrajectory:
    samples: list[BodySample]
    status: str = "ok"
    warnings: list[str] = field(default_factory=list)
    error: CollisionError | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    @property
    def final(self) -> BodySample:
        return self.samples[-1]

    def __len__(self):
        return len(self.samples)


def _raw_body_accelerations(
    r: np.ndarray, ms: MassSystem, n_exp: float
) -> np.ndarray:
    d = r[ms._idx_i] - r[ms._idx_j]
    r2 = np.einsum("ij,ij->i", d, d)
    worst = int(r2.argmin())
    if r2[worst] < (COLLISION_TOL**2) * r2.max():
        raise CollisionError(ms.pairs[worst], math.sqrt(r2[worst]))
    # Pairwise pull with Newton's third law applied via index scatter.
    f = n_exp * d / power_np2(r2, n_exp)[:, None]
    acc = np.zeros_like(r)
    np.subtract.at(acc, ms._idx_i, ms.masses[ms._idx_j][:, None] * f)
    np.add.at(acc, ms._idx_j, ms.masses[ms._idx_i][:, None] * f)
    return acc


def body_accelerations(
    bodies: BodyState, ms: MassSystem, law: PotentialLaw
) -> np.ndarray:
    """rddot_i = -sum_{j != i} n m_j (r_i - r_j) / |r_i - r_j|^{n+2}.

    Raises:
        CollisionError: if any separation is below the collision cutoff.
    """
    _check_counts(bodies.n_bodies, ms)
    try:
        return _raw_body_accelerations(bodies.r, ms, law.exponent)
    except CollisionError as exc:
        raise CollisionError(exc.pair, exc.separation, time=bodies.time) from None


def _body_diagnostics(
    r: np.ndarray, v: np.ndarray, ms: MassSystem, n_exp: float
) -> BodyDiagnostics:
    T = 0.5 * float(ms.masses @ np.einsum("ij,ij->i", v, v))
    d = r[ms._idx_i] - r[ms._idx_j]
    dist = np.sqrt(np.einsum("ij,ij->i", d, d))
    V = -float((ms.pair_mass_product / dist**n_exp).sum())
    L = (ms.masses[:, None] * np.cross(r, v)).sum(axis=0)
    L.setflags(write=False)
    return BodyDiagnostics(kinetic=T, potential=V, energy=T + V, angular_momentum=L)


def integrate_bodies(
    initial: BodyState,
    ms: MassSystem,
    law: PotentialLaw,
    cfg: IntegratorConfig,
) -> BodyTrajectory:
    """Propagate body coordinates with RK4 (or leapfrog) at fixed step.

    Contracts mirror the pair-coordinate ``integrate``: samples every
    ``monitor_every`` steps plus the final time, and a mid-run collision
    returns the partial trajectory with the error attached.
    """
    _check_counts(initial.n_bodies, ms)
    if cfg.scheme not in ("rk4", "leapfrog"):
        raise ValueError(f"unsupported scheme {cfg.scheme!r}")
    if not cfg.t_end > initial.time:
        raise ValueError("t_end must exceed the initial state's time")

    t0 = initial.time
    span = cfg.t_end - t0
    n_steps = max(1, math.ceil(span / cfg.dt - 1e-12))
    h = span / n_steps
    n_exp = law.exponent

    r = np.array(initial.r, dtype=float)
    v = np.array(initial.rdot, dtype=float)
    traj = BodyTrajectory(samples=[])

    def record(step: int) -> None:
        t = t0 + step * h
        traj.samples.append(
            BodySample(
                time=t,
                state=BodyState(r, v, time=t),
                diagnostics=_body_diagnostics(r, v, ms, n_exp),
            )
        )

    record(0)

    def pair_d2(rr):
        d = rr[ms._idx_i] - rr[ms._idx_j]
        return np.einsum("ij,ij->i", d, d)

    d2_prev = pair_d2(r)
    try:
        if cfg.scheme == "leapfrog":
            acc = _raw_body_accelerations(r, ms, n_exp)
        for step in range(1, n_steps + 1):
            if cfg.scheme == "rk4":
                a1 = _raw_body_accelerations(r, ms, n_exp)
                r2, v2 = r + (0.5 * h) * v, v + (0.5 * h) * a1
                a2 = _raw_body_accelerations(r2, ms, n_exp)
                r3, v3 = r + (0.5 * h) * v2, v + (0.5 * h) * a2
                a3 = _raw_body_accelerations(r3, ms, n_exp)
                r4, v4 = r + h * v3, v + h * a3
                a4 = _raw_body_accelerations(r4, ms, n_exp)
                r_new = r + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
                v_new = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            else:
                v_half = v + (0.5 * h) * acc
                r_new = r + h * v_half
                acc = _raw_body_accelerations(r_new, ms, n_exp)
                v_new = v_half + (0.5 * h) * acc
            d2_new = pair_d2(r_new)
            bad = _unresolved_pair(d2_prev, d2_new)
            if bad is not None:
                raise CollisionError(
                    ms.pairs[bad], math.sqrt(max(d2_new[bad], 0.0))
                )
            r, v, d2_prev = r_new, v_new, d2_new
            if step == n_steps or step % cfg.monitor_every == 0:
                record(step)
    except CollisionError as exc:
        traj.error = CollisionError(exc.pair, exc.separation, time=traj.samples[-1].time)
        traj.status = "collision"
        return traj

    return traj
