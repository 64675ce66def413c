"""Equilateral and collinear central configurations.

Equilateral (Lagrange): rotating any planar two-body solution of
qddot + n M q / q^{n+2} = 0 by 120 degrees produces the other two pair
vectors; the identity I + Rot + Rot^2 = 0 keeps the triangle condition
satisfied at all times and the multiplier vector vanishes.

Collinear (Euler): with bodies ordered 1, 2, 3 along a line, the ratio
alpha = q_23 / q_12 of a uniformly rotating solution is the unique
positive root of the monotone function

    E(x) = M (x - x^{-(n+1)})
           + (m1 - m3 x) (1 + x^{-(n+1)} - (1+x)^{-(n+1)}).

Two families of simpler monotone functions R_k and Q_k, with roots
sigma_k and tau_k = 1/sigma_k, bound alpha depending on how the end
masses compare to (2^{n+1}/(2^{n+1}-1)) times the rest:

    1. m1 above the threshold:        alpha in [x_L, tau_1]
    2. m1 below it, but m1 >= m3:     alpha in [x_L, 1]
    3. m3 below it, but m3 >= m1:     alpha in [1, x_L]
    4. m3 above the threshold:        alpha in [sigma_3, x_L]

where x_L = (m3/m1)^{1/(n+1)}.  Relabeling the line from the other end
maps alpha to 1/alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import MassSystem, PairState
from .kinetics import PotentialLaw
from .errors import PairSpaceError

__all__ = [
    "CollinearReport",
    "rotation_third",
    "E_of_x",
    "E_of_x_expanded",
    "E_derivative",
    "R_of_x",
    "Q_of_x",
    "sigma_tau_roots",
    "euler_alpha",
    "bound_classify",
    "mass_threshold",
    "collinear_phi_coefficient",
    "collinear_angular_rate",
    "euler_initial_conditions",
    "circular_pair_solution",
    "two_body_pair_solution",
    "lagrange_construct",
    "lagrange_circular_states",
    "ROOT_TOL",
]

# Residual tolerance for all scalar root solves, relative to the sum of
# the absolute values of the function's terms at the root.
ROOT_TOL = 1e-12


def rotation_third() -> np.ndarray:
    """Rotation by 2 pi / 3 about z; I + Rot + Rot^2 kills plane vectors."""
    c, s = -0.5, math.sqrt(3.0) / 2.0
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _require_three(ms: MassSystem) -> None:
    if ms.n_bodies != 3:
        raise ValueError("central-configuration analysis needs exactly 3 bodies")


def _check_x(x: float) -> float:
    x = float(x)
    if not x > 0.0:
        raise ValueError("x must be positive")
    return x


def E_of_x(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """Collinear balance function E(x); its positive root is alpha."""
    _require_three(ms)
    x = _check_x(x)
    m1, _, m3 = ms.masses
    M = ms.total_mass
    n1 = law.exponent + 1.0
    return M * (x - x**-n1) + (m1 - m3 * x) * (1.0 + x**-n1 - (1.0 + x) ** -n1)


def E_of_x_expanded(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """Algebraically expanded form of E(x), kept as a cross-check."""
    _require_three(ms)
    x = _check_x(x)
    m1, _, m3 = ms.masses
    M = ms.total_mass
    n = law.exponent
    return (
        (M - m3) * x
        + m1
        - m3 / x**n
        - (M - m1) / x ** (n + 1.0)
        - (m1 - m3 * x) / (1.0 + x) ** (n + 1.0)
    )


def _inv_power_gap(x: float, n1: float) -> float:
    """x^-n1 - (1+x)^-n1 without cancellation for large x."""
    # 1 - (x/(1+x))^n1 = -expm1(-n1 log1p(1/x)), accurate in both limits
    return x**-n1 * -math.expm1(-n1 * math.log1p(1.0 / x))


def _one_minus_inv_power(x: float, n1: float) -> float:
    """1 - (1+x)^-n1 without cancellation for small x."""
    return -math.expm1(-n1 * math.log1p(x))


def _E_grouped(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """E(x) with opened brackets, grouped to avoid mass cancellation.

    E(x) = (m1+m2) x - (m2+m3) x^-(n+1)
           + m1 (1 - (1+x)^-(n+1)) - m3 x (x^-(n+1) - (1+x)^-(n+1)).

    Algebraically equal to :func:`E_of_x`; the coefficients are sums of
    masses instead of differences like M - m3, so the evaluation stays
    well conditioned for extreme mass ratios.  This is the form the root
    solve uses.
    """
    m1, m2, m3 = ms.masses
    n1 = law.exponent + 1.0
    return (
        (m1 + m2) * x
        - (m2 + m3) * x**-n1
        + m1 * _one_minus_inv_power(x, n1)
        - m3 * x * _inv_power_gap(x, n1)
    )


def _E_grouped_derivative(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """dE/dx in the positive-term arrangement with summed coefficients."""
    m1, m2, m3 = ms.masses
    n = law.exponent
    return (
        (m1 + m2)
        + (n + 1.0) * (m2 + m3) / x ** (n + 2.0)
        + (n + 1.0) * (m1 + m3) / (1.0 + x) ** (n + 2.0)
        + n * m3 * _inv_power_gap(x, n + 1.0)
    )


def _E_scale(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """Sum of absolute term magnitudes of the grouped form at x."""
    m1, m2, m3 = ms.masses
    n1 = law.exponent + 1.0
    return (
        (m1 + m2) * x
        + (m2 + m3) * x**-n1
        + m1 * abs(_one_minus_inv_power(x, n1))
        + m3 * x * abs(_inv_power_gap(x, n1))
    )


def E_derivative(x: float, ms: MassSystem, law: PotentialLaw) -> float:
    """dE/dx arranged as a sum of manifestly positive terms.

    Positivity for every x > 0 is what makes the root of E unique.
    """
    _require_three(ms)
    x = _check_x(x)
    m1, _, m3 = ms.masses
    M = ms.total_mass
    n = law.exponent
    return (
        (M - m3)
        + (n + 1.0) * (M - m1) / x ** (n + 2.0)
        + (n + 1.0) * m1 / (1.0 + x) ** (n + 2.0)
        + (n + 1.0) * m3 / (1.0 + x) ** (n + 2.0)
        + n * m3 * (1.0 / x ** (n + 1.0) - 1.0 / (1.0 + x) ** (n + 1.0))
    )


def mass_threshold(law: PotentialLaw) -> float:
    """2^{n+1} / (2^{n+1} - 1): the end-mass factor separating the cases."""
    p = 2.0 ** (law.exponent + 1.0)
    return p / (p - 1.0)


def _mass_ratio(ms: MassSystem, k: int) -> float:
    """(m_i + m_j) / m_k for the complementary indices of k (1-based)."""
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2, or 3")
    m = ms.masses
    others = [m[p] for p in range(3) if p != k - 1]
    return float((others[0] + others[1]) / m[k - 1])


def R_of_x(x: float, k: int, ms: MassSystem, law: PotentialLaw) -> float:
    """R_k(x) = (m_i+m_j)/m_k + (1+x)^{-(n+1)} - x^{-(n+1)} (monotone)."""
    _require_three(ms)
    x = _check_x(x)
    n1 = law.exponent + 1.0
    return _mass_ratio(ms, k) + (1.0 + x) ** -n1 - x**-n1


def Q_of_x(x: float, k: int, ms: MassSystem, law: PotentialLaw) -> float:
    """Q_k(x) = 1 - (1+x)^{-(n+1)} - ((m_i+m_j)/m_k) x^{-(n+1)} (monotone)."""
    _require_three(ms)
    x = _check_x(x)
    n1 = law.exponent + 1.0
    return 1.0 - (1.0 + x) ** -n1 - _mass_ratio(ms, k) * x**-n1


def _solve_monotone(f, df, scale, x0: float = 1.0) -> tuple[float, tuple[float, float]]:
    """Root of a strictly increasing f crossing from -inf to positive values.

    Brackets by geometric expansion from x0, bisects, then polishes with
    safeguarded Newton until |f| <= ROOT_TOL * scale(x).  Returns the
    root and the initial bracket.
    """
    lo = hi = float(x0)
    flo = f(lo)
    if flo > 0.0:
        while flo > 0.0:
            lo *= 0.5
            if lo < 1e-300:
                raise PairSpaceError("bracketing failed toward zero")
            flo = f(lo)
        hi = lo * 2.0
    else:
        fhi = f(hi)
        while fhi <= 0.0:
            hi *= 2.0
            if hi > 1e300:
                raise PairSpaceError("bracketing failed toward infinity")
            fhi = f(hi)
        lo = hi * 0.5 if hi > x0 else lo
    bracket = (lo, hi)

    for _ in range(200):
        if hi - lo <= 1e-3 * lo:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid

    x = 0.5 * (lo + hi)
    for _ in range(100):
        fx = f(x)
        if fx > 0.0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        x_new = x - fx / df(x)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        # polish to the last bit; the residual contract below is stricter
        # than needed once Newton stalls at rounding level
        if abs(x_new - x) <= 5e-16 * abs(x):
            x = x_new
            break
        x = x_new
    if abs(f(x)) > ROOT_TOL * scale(x):
        raise PairSpaceError("root polish did not converge")
    return float(x), (float(bracket[0]), float(bracket[1]))


def _sigma_root(k: int, ms: MassSystem, law: PotentialLaw) -> float:
    n1 = law.exponent + 1.0
    ratio = _mass_ratio(ms, k)

    def f(x):
        return ratio - _inv_power_gap(x, n1)

    def df(x):
        return n1 * _inv_power_gap(x, n1 + 1.0)

    def scale(x):
        return ratio + (1.0 + x) ** -n1 + x**-n1

    return _solve_monotone(f, df, scale)[0]


def _tau_root(k: int, ms: MassSystem, law: PotentialLaw) -> float:
    n1 = law.exponent + 1.0
    ratio = _mass_ratio(ms, k)

    def f(x):
        return _one_minus_inv_power(x, n1) - ratio * x**-n1

    def df(x):
        return n1 * ((1.0 + x) ** -(n1 + 1.0) + ratio * x ** -(n1 + 1.0))

    def scale(x):
        return 1.0 + (1.0 + x) ** -n1 + ratio * x**-n1

    return _solve_monotone(f, df, scale)[0]


def sigma_tau_roots(
    ms: MassSystem, law: PotentialLaw
) -> tuple[dict[int, float], dict[int, float]]:
    """Unique positive roots sigma_k of R_k and tau_k of Q_k, k = 1..3.

    Both families are solved independently (tau is not derived from
    1/sigma), so the reciprocal identity stays a checkable property.
    """
    _require_three(ms)
    sigma = {k: _sigma_root(k, ms, law) for k in (1, 2, 3)}
    tau = {k: _tau_root(k, ms, law) for k in (1, 2, 3)}
    return sigma, tau


@dataclass(frozen=True)
class CollinearReport:
    """Complete record of a collinear-configuration solve.

    Attributes:
        alpha: the distance ratio q_23 / q_12 of the rotating solution.
        bracket: the sign-change interval the root search started from.
        case_id: which of the four end-mass cases applies (1-4).
        interval: the case's closed bounds on alpha.
        x_L: (m3/m1)^{1/(n+1)}, the mass-ratio bound point.
        sigma, tau: roots of R_k and Q_k keyed by k in {1, 2, 3}.
        exponent: potential exponent n.
        masses: the three masses as given.
    """

    alpha: float
    bracket: tuple[float, float]
    case_id: int
    interval: tuple[float, float]
    x_L: float
    sigma: dict[int, float]
    tau: dict[int, float]
    exponent: float
    masses: tuple[float, float, float]


def bound_classify(
    ms: MassSystem,
    law: PotentialLaw,
    alpha: float,
    sigma: dict[int, float],
    tau: dict[int, float],
) -> tuple[int, tuple[float, float]]:
    """Case id and bounding interval for a computed alpha.

    Also asserts alpha lies inside the case interval and inside the
    global envelope [min(x_L, 1/x_L), max(x_L, 1/x_L)]; a failure here
    signals an internal inconsistency, not bad input.
    """
    _require_three(ms)
    m1, m2, m3 = ms.masses
    thr = mass_threshold(law)
    x_L = float((m3 / m1) ** (1.0 / (law.exponent + 1.0)))
    if m1 >= m3:
        if m1 > thr * (m2 + m3):
            case, lo, hi = 1, x_L, float(tau[1])
        else:
            case, lo, hi = 2, x_L, 1.0
    else:
        if m3 > thr * (m1 + m2):
            case, lo, hi = 4, float(sigma[3]), x_L
        else:
            case, lo, hi = 3, 1.0, x_L

    slack = 1e-9 * max(1.0, alpha)
    if not (lo - slack <= alpha <= hi + slack):
        raise PairSpaceError(
            f"alpha={alpha!r} escaped its case-{case} interval [{lo!r}, {hi!r}]"
        )
    env_lo, env_hi = min(x_L, 1.0 / x_L), max(x_L, 1.0 / x_L)
    if not (env_lo - slack <= alpha <= env_hi + slack):
        raise PairSpaceError(
            f"alpha={alpha!r} escaped the envelope [{env_lo!r}, {env_hi!r}]"
        )
    return case, (float(lo), float(hi))


def euler_alpha(ms: MassSystem, law: PotentialLaw) -> CollinearReport:
    """Solve E(alpha) = 0 and assemble the full collinear report.

    Existence and uniqueness of the root hold for every choice of
    positive masses (E runs monotonically from -inf to +inf), so this
    never fails for valid input.  Both m1 >= m3 and m1 < m3 labelings
    are accepted; the bound cases adapt.
    """
    _require_three(ms)

    def f(x):
        return _E_grouped(x, ms, law)

    def df(x):
        return _E_grouped_derivative(x, ms, law)

    def scale(x):
        return _E_scale(x, ms, law)

    alpha, bracket = _solve_monotone(f, df, scale)
    sigma, tau = sigma_tau_roots(ms, law)
    case, interval = bound_classify(ms, law, alpha, sigma, tau)
    m = ms.masses
    return CollinearReport(
        alpha=alpha,
        bracket=bracket,
        case_id=case,
        interval=interval,
        x_L=float((m[2] / m[0]) ** (1.0 / (law.exponent + 1.0))),
        sigma=sigma,
        tau=tau,
        exponent=law.exponent,
        masses=(float(m[0]), float(m[1]), float(m[2])),
    )


def collinear_property_violations(
    report: CollinearReport, ms: MassSystem, law: PotentialLaw
) -> list[str]:
    """Re-assert every root/bound property on a finished report.

    Returns human-readable descriptions of violated properties (empty in
    normal operation; anything here signals an internal inconsistency).
    Checked: the case interval and global envelope, the reciprocal root
    identity, root ordering and separation across indices, the unit
    threshold, the mass-power bounds, and the sign of the balance
    function at the cross roots.
    """
    bad: list[str] = []
    a, sig, tau = report.alpha, report.sigma, report.tau
    n1 = law.exponent + 1.0
    m = {1: ms.masses[0], 2: ms.masses[1], 3: ms.masses[2]}
    slack = 1e-9 * max(1.0, a)

    lo, hi = report.interval
    if not (lo - slack <= a <= hi + slack):
        bad.append(f"alpha {a!r} outside case-{report.case_id} interval [{lo!r},{hi!r}]")
    env = sorted((report.x_L, 1.0 / report.x_L))
    if not (env[0] - slack <= a <= env[1] + slack):
        bad.append(f"alpha {a!r} outside envelope {env}")
    if not E_of_x(sig[3], ms, law) < 0.0:
        bad.append("E(sigma_3) not negative")
    if not E_of_x(tau[1], ms, law) > 0.0:
        bad.append("E(tau_1) not positive")
    thr = mass_threshold(law)
    for k in (1, 2, 3):
        if abs(tau[k] * sig[k] - 1.0) > 1e-12:
            bad.append(f"tau_{k} * sigma_{k} != 1")
        others = [p for p in (1, 2, 3) if p != k]
        crit = thr * (m[others[0]] + m[others[1]])
        if m[k] > crit and not (sig[k] > 1.0 and tau[k] < 1.0):
            bad.append(f"threshold property failed for k={k} (heavy side)")
        if m[k] < crit and not (sig[k] < 1.0 and tau[k] > 1.0):
            bad.append(f"threshold property failed for k={k} (light side)")
        for j in others:
            if not tau[j] > sig[k]:
                bad.append(f"tau_{j} <= sigma_{k}")
            if m[j] > m[k] and not (sig[j] > sig[k] and tau[k] > tau[j]):
                bad.append(f"ordering property failed for j={j}, k={k}")
            if not sig[k] < (m[k] / m[j]) ** (1.0 / n1):
                bad.append(f"sigma_{k} power bound failed against j={j}")
            if not tau[k] > (m[j] / m[k]) ** (1.0 / n1):
                bad.append(f"tau_{k} power bound failed against j={j}")
    return bad


def collinear_phi_coefficient(
    alpha: float, ms: MassSystem, law: PotentialLaw
) -> float:
    """Scalar s with phi = s * q_12 / q_12^{n+2} on the collinear line."""
    _require_three(ms)
    n = law.exponent
    m = ms.masses
    bracket = 1.0 + alpha ** -(n + 1.0) - (1.0 + alpha) ** -(n + 1.0)
    return n * (m[0] * m[1] * m[2] / ms.total_mass) * bracket


def collinear_angular_rate(
    q12: float, alpha: float, ms: MassSystem, law: PotentialLaw
) -> float:
    """Angular velocity of the rigidly rotating collinear solution.

    From the q_12 equation of motion with qddot = -omega^2 q:
    omega^2 = (n M - s / mu_12) / q_12^{n+2}, s the collinear phi
    coefficient.  Equivalently omega^2 = n (M - m3 B) / q_12^{n+2}.
    """
    n = law.exponent
    mu12 = ms.mu(0, 1)
    s = collinear_phi_coefficient(alpha, ms, law)
    omega2 = (n * ms.total_mass - s / mu12) / q12 ** (n + 2.0)
    if not omega2 > 0.0:
        raise PairSpaceError("non-positive omega^2 for collinear rotation")
    return math.sqrt(omega2)


def euler_initial_conditions(
    ms: MassSystem,
    law: PotentialLaw,
    q12_magnitude: float = 1.0,
    mode: str = "circular",
) -> PairState:
    """Collinear three-body state along the x axis.

    ``mode="rest"`` gives zero velocities (the homothetic-collapse
    release); ``mode="circular"`` gives the rigid rotation about z whose
    shape is preserved by the dynamics.  The triangle condition holds
    exactly by construction: q_23 = alpha q_12 and
    q_31 = -(1 + alpha) q_12.
    """
    if mode not in ("rest", "circular"):
        raise ValueError("mode must be 'rest' or 'circular'")
    if not q12_magnitude > 0.0:
        raise ValueError("q12_magnitude must be positive")
    report = euler_alpha(ms, law)
    a = report.alpha
    d = float(q12_magnitude)
    q12 = np.array([d, 0.0, 0.0])
    q23 = a * q12
    q13 = (1.0 + a) * q12  # canonical row is q_13 = -q_31
    q = np.array([q12, q13, q23])
    if mode == "rest":
        qdot = np.zeros_like(q)
    else:
        omega = collinear_angular_rate(d, a, ms, law)
        qdot = omega * np.cross([0.0, 0.0, 1.0], q)
    return PairState(np.zeros(3), np.zeros(3), q, qdot, time=0.0)


def circular_pair_solution(
    total_mass: float,
    law: PotentialLaw,
    magnitude: float,
    times: Sequence[float],
) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Analytic circular solution of qddot + n M q / q^{n+2} = 0.

    The vector rotates in the xy plane at omega = sqrt(n M / q^{n+2}).
    """
    if not magnitude > 0.0:
        raise ValueError("magnitude must be positive")
    n = law.exponent
    omega = math.sqrt(n * total_mass / magnitude ** (n + 2.0))
    out = []
    for t in times:
        c, s = math.cos(omega * t), math.sin(omega * t)
        q = magnitude * np.array([c, s, 0.0])
        qd = magnitude * omega * np.array([-s, c, 0.0])
        out.append((float(t), q, qd))
    return out


def two_body_pair_solution(
    total_mass: float,
    law: PotentialLaw,
    q0: np.ndarray,
    qdot0: np.ndarray,
    t_end: float,
    dt: float,
    monitor_every: int = 1,
) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Numerical solution of qddot + n M q / q^{n+2} = 0 for general data.

    Reuses the pair integrator on a fictitious equal-mass two-body system
    whose total mass matches, since its single pair equation is exactly
    this one.
    """
    from .dynamics import IntegratorConfig, integrate

    ms2 = MassSystem([0.5 * total_mass, 0.5 * total_mass])
    state = PairState(np.zeros(3), np.zeros(3), [q0], [qdot0], time=0.0)
    cfg = IntegratorConfig(dt=dt, t_end=t_end, monitor_every=monitor_every)
    traj = integrate(state, ms2, PotentialLaw(law.exponent), cfg)
    return [(s.time, s.state.q[0], s.state.qdot[0]) for s in traj.samples]


def lagrange_construct(
    ms: MassSystem,
    law: PotentialLaw,
    pair12_solution: Iterable[tuple[float, np.ndarray, np.ndarray]],
) -> list[PairState]:
    """Equilateral three-body trajectory from a planar two-body solution.

    Each sample's q_23 and q_31 are the 120- and 240-degree rotations of
    q_12, which keeps the three distances equal and the triangle sum at
    zero for all times.  The input must lie in the xy plane.

    Raises:
        ValueError: if any sample leaves the xy plane.
    """
    _require_three(ms)
    rot = rotation_third()
    rot2 = rot @ rot
    states = []
    for t, q12, qd12 in pair12_solution:
        q12 = np.asarray(q12, dtype=float)
        qd12 = np.asarray(qd12, dtype=float)
        planar_tol = 1e-12 * max(np.abs(q12).max(), np.abs(qd12).max(), 1e-300)
        if abs(q12[2]) > planar_tol or abs(qd12[2]) > planar_tol:
            raise ValueError("pair12 solution must lie in the xy plane")
        q23 = rot @ q12
        q31 = rot2 @ q12
        qd23 = rot @ qd12
        qd31 = rot2 @ qd12
        q = np.array([q12, -q31, q23])  # canonical rows (q_12, q_13, q_23)
        qd = np.array([qd12, -qd31, qd23])
        states.append(PairState(np.zeros(3), np.zeros(3), q, qd, time=t))
    if not states:
        raise ValueError("pair12 solution is empty")
    return states


def lagrange_circular_states(
    ms: MassSystem,
    law: PotentialLaw,
    magnitude: float,
    times: Sequence[float],
) -> list[PairState]:
    """Equilateral states rotating on the analytic circular solution."""
    sol = circular_pair_solution(ms.total_mass, law, magnitude, times)
    return lagrange_construct(ms, law, sol)
