"""Randomized self-verification of the algebraic identities.

Every check draws seeded random instances, evaluates an identity both
ways, and reports the worst relative error against a fixed tolerance.
Groups:

    kinetic      pair-form kinetic energy vs the plain body-space sum
    multipliers  row sums, triple and quartet relations, antisymmetry
                 of the triplet forces and multiplier sums
    threebody    multiplier vector, torque identity, total angular
                 momentum equality, energy-rate orthogonality
    roots        properties of sigma_k / tau_k and the E decomposition
    bounds       case intervals, envelope, labeling-inversion symmetry

The same seed always reproduces the same instances and therefore the
same report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BodyState, MassSystem, bodies_to_pairs, pairs_to_bodies
from .kinetics import (
    PotentialLaw,
    kinetic_energy,
    multiplier_sum_J,
    triplet_force,
)
from .threebody import pair_angular_momenta, phi
from .central import (
    E_derivative,
    E_of_x,
    E_of_x_expanded,
    Q_of_x,
    R_of_x,
    euler_alpha,
    sigma_tau_roots,
)

__all__ = ["CheckResult", "run_checks", "GROUPS", "random_pair_state", "random_masses"]

GROUPS = ("kinetic", "multipliers", "threebody", "roots", "bounds")

IDENTITY_TOL = 1e-12
INVERSION_TOL = 1e-10
DERIVATIVE_TOL = 1e-6

_N_EXPONENTS = (0.5, 1.0, 2.0, 3.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    cases: int
    max_error: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (
            f"[{mark}] {self.group}/{self.name}: max error {self.max_error:.3e}"
            f" (tol {self.tolerance:.1e}, {self.cases} cases)"
        )


def random_masses(rng: np.random.Generator, n: int = 3) -> MassSystem:
    return MassSystem(rng.uniform(0.2, 5.0, size=n))


def random_pair_state(rng: np.random.Generator, ms: MassSystem):
    """Realizable random state with separations bounded away from zero."""
    n = ms.n_bodies
    while True:
        r = rng.uniform(-1.0, 1.0, size=(n, 3))
        d = r[ms._idx_i] - r[ms._idx_j]
        if np.sqrt(np.einsum("ij,ij->i", d, d)).min() > 0.15:
            break
    v = 0.5 * rng.standard_normal((n, 3))
    return bodies_to_pairs(BodyState(r, v), ms)


def _law(rng: np.random.Generator) -> PotentialLaw:
    return PotentialLaw(float(rng.choice(_N_EXPONENTS)))


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1e-300)


def _check_kinetic(rng, cases) -> list[CheckResult]:
    worst = 0.0
    total = 0
    for n in range(2, 7):
        for _ in range(cases):
            ms = random_masses(rng, n)
            state = random_pair_state(rng, ms)
            bodies = pairs_to_bodies(state, ms)
            direct = 0.5 * float(
                ms.masses @ np.einsum("ij,ij->i", bodies.rdot, bodies.rdot)
            )
            pair_form = kinetic_energy(state, ms)
            worst = max(worst, _rel(abs(pair_form - direct), abs(direct)))
            total += 1
    return [
        CheckResult(
            "pair-vs-body-kinetic-energy", "kinetic", total, worst,
            IDENTITY_TOL, worst <= IDENTITY_TOL,
        )
    ]


def _force_scale(state, ms, law) -> float:
    d = state.separations()
    return float(
        (law.exponent * ms.pair_mass_product / d ** (law.exponent + 1.0)).max()
    )


def _check_multipliers(rng, cases) -> list[CheckResult]:
    worst_row = worst_triple = worst_anti = worst_quartet = 0.0
    n_row = n_triple = n_anti = n_quartet = 0
    for _ in range(cases):
        n = int(rng.integers(4, 6))
        ms = random_masses(rng, n)
        law = _law(rng)
        state = random_pair_state(rng, ms)
        fscale = _force_scale(state, ms, law)

        for i in range(n):
            total = np.zeros(3)
            for j in range(n):
                if j != i:
                    total += multiplier_sum_J(state, ms, law, i, j)
            mu_scale = max(ms.mu(i, j) for j in range(n) if j != i)
            worst_row = max(worst_row, _rel(np.linalg.norm(total), mu_scale * fscale))
            n_row += 1

        i, j, k = sorted(rng.choice(n, size=3, replace=False).tolist())
        F = triplet_force(state, ms, law, i, j, k).value
        lhs = (
            multiplier_sum_J(state, ms, law, i, j) / ms.mu(i, j)
            + multiplier_sum_J(state, ms, law, j, k) / ms.mu(j, k)
            + multiplier_sum_J(state, ms, law, k, i) / ms.mu(k, i)
        )
        worst_triple = max(worst_triple, _rel(np.linalg.norm(lhs - F), fscale))
        n_triple += 1

        swapped = triplet_force(state, ms, law, j, i, k).value
        cyclic = triplet_force(state, ms, law, j, k, i).value
        worst_anti = max(
            worst_anti,
            _rel(np.linalg.norm(F + swapped), fscale),
            _rel(np.linalg.norm(F - cyclic), fscale),
        )
        n_anti += 1

        a, b, c, d = sorted(rng.choice(n, size=4, replace=False).tolist())
        lhs = triplet_force(state, ms, law, a, b, c).value
        rhs = (
            triplet_force(state, ms, law, a, b, d).value
            + triplet_force(state, ms, law, b, c, d).value
            + triplet_force(state, ms, law, c, a, d).value
        )
        worst_quartet = max(worst_quartet, _rel(np.linalg.norm(lhs - rhs), fscale))
        n_quartet += 1
    return [
        CheckResult("row-sum-zero", "multipliers", n_row, worst_row,
                    IDENTITY_TOL, worst_row <= IDENTITY_TOL),
        CheckResult("triple-relation", "multipliers", n_triple, worst_triple,
                    IDENTITY_TOL, worst_triple <= IDENTITY_TOL),
        CheckResult("force-antisymmetry", "multipliers", n_anti, worst_anti,
                    IDENTITY_TOL, worst_anti <= IDENTITY_TOL),
        CheckResult("quartet-relation", "multipliers", n_quartet, worst_quartet,
                    IDENTITY_TOL, worst_quartet <= IDENTITY_TOL),
    ]


def _check_threebody(rng, cases) -> list[CheckResult]:
    worst_phi = worst_torque = worst_total = worst_rate = 0.0
    for _ in range(cases):
        ms = random_masses(rng, 3)
        law = _law(rng)
        state = random_pair_state(rng, ms)
        fscale = _force_scale(state, ms, law)

        f = phi(state, ms, law)
        worst_phi = max(
            worst_phi,
            _rel(np.linalg.norm(f - multiplier_sum_J(state, ms, law, 0, 1)), fscale),
            _rel(np.linalg.norm(f - multiplier_sum_J(state, ms, law, 1, 2)), fscale),
            _rel(np.linalg.norm(f - multiplier_sum_J(state, ms, law, 2, 0)), fscale),
        )

        # torque identity: q_12 x phi against the collinearity-difference form
        q12, q23 = state.q_pair(0, 1), state.q_pair(1, 2)
        d23 = float(np.linalg.norm(q23))
        d31 = float(np.linalg.norm(state.q_pair(2, 0)))
        n = law.exponent
        rhs = (
            n
            * ms.masses[2]
            * ms.mu(0, 1)
            * (d23 ** -(n + 2.0) - d31 ** -(n + 2.0))
            * np.cross(q12, q23)
        )
        lhs = np.cross(q12, f)
        scale = np.linalg.norm(q12) * np.linalg.norm(f)
        worst_torque = max(worst_torque, _rel(np.linalg.norm(lhs - rhs), scale))

        L = pair_angular_momenta(state, ms)
        bodies = pairs_to_bodies(state, ms)
        rb = bodies.r - ms.masses @ bodies.r / ms.total_mass
        vb = bodies.rdot - ms.masses @ bodies.rdot / ms.total_mass
        body_L = (ms.masses[:, None] * np.cross(rb, vb)).sum(axis=0)
        worst_total = max(
            worst_total,
            _rel(np.linalg.norm(L.total - body_L), np.linalg.norm(body_L)),
        )

        vsum = state.qdot_pair(0, 1) + state.qdot_pair(1, 2) + state.qdot_pair(2, 0)
        vscale = max(np.linalg.norm(state.qdot_pair(a, b)) for a, b in ((0, 1), (1, 2), (2, 0)))
        worst_rate = max(
            worst_rate,
            _rel(abs(float(f @ vsum)), np.linalg.norm(f) * vscale),
        )
    return [
        CheckResult("phi-equals-multiplier-sums", "threebody", cases, worst_phi,
                    IDENTITY_TOL, worst_phi <= IDENTITY_TOL),
        CheckResult("torque-identity", "threebody", cases, worst_torque,
                    IDENTITY_TOL, worst_torque <= IDENTITY_TOL),
        CheckResult("total-angular-momentum", "threebody", cases, worst_total,
                    IDENTITY_TOL, worst_total <= IDENTITY_TOL),
        CheckResult("energy-rate-orthogonality", "threebody", cases, worst_rate,
                    IDENTITY_TOL, worst_rate <= IDENTITY_TOL),
    ]


def _check_roots(rng, cases) -> list[CheckResult]:
    worst_recip = worst_order = worst_decomp = worst_forms = 0.0
    sign_ok = True
    bound_ok = True
    worst_deriv = 0.0
    deriv_positive = True
    for _ in range(cases):
        ms = random_masses(rng, 3)
        law = _law(rng)
        sigma, tau = sigma_tau_roots(ms, law)
        n1 = law.exponent + 1.0
        m = ms.masses

        for k in (1, 2, 3):
            worst_recip = max(worst_recip, abs(tau[k] * sigma[k] - 1.0))
            for j in (1, 2, 3):
                if j == k:
                    continue
                # strict ordering, for masses separated beyond root accuracy
                if m[j - 1] > m[k - 1] * (1.0 + 1e-9) and not (
                    sigma[j] > sigma[k] and tau[k] > tau[j]
                ):
                    worst_order = max(worst_order, 1.0)
                if not tau[j] > sigma[k]:
                    worst_order = max(worst_order, 1.0)
                if not sigma[k] < (m[k - 1] / m[j - 1]) ** (1.0 / n1):
                    bound_ok = False
                if not tau[k] > (m[j - 1] / m[k - 1]) ** (1.0 / n1):
                    bound_ok = False

        if not E_of_x(sigma[3], ms, law) < 0.0:
            sign_ok = False
        if not E_of_x(tau[1], ms, law) > 0.0:
            sign_ok = False

        for _ in range(4):
            x = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
            e = E_of_x(x, ms, law)
            scale = abs(e) + 1.0
            decomp = m[0] * Q_of_x(x, 1, ms, law) + m[2] * x * R_of_x(x, 3, ms, law)
            worst_decomp = max(worst_decomp, _rel(abs(e - decomp), scale))
            worst_forms = max(
                worst_forms, _rel(abs(e - E_of_x_expanded(x, ms, law)), scale)
            )
            d = E_derivative(x, ms, law)
            if not d > 0.0:
                deriv_positive = False
            h = 1e-3 * x
            fd = (
                -E_of_x(x + 2 * h, ms, law)
                + 8 * E_of_x(x + h, ms, law)
                - 8 * E_of_x(x - h, ms, law)
                + E_of_x(x - 2 * h, ms, law)
            ) / (12 * h)
            worst_deriv = max(worst_deriv, _rel(abs(d - fd), abs(d)))
    return [
        CheckResult("reciprocal-roots", "roots", cases, worst_recip,
                    IDENTITY_TOL, worst_recip <= IDENTITY_TOL),
        CheckResult("root-ordering", "roots", cases, worst_order,
                    0.0, worst_order == 0.0),
        CheckResult("root-power-bounds", "roots", cases,
                    0.0 if bound_ok else 1.0, 0.0, bound_ok),
        CheckResult("balance-sign-at-roots", "roots", cases,
                    0.0 if sign_ok else 1.0, 0.0, sign_ok),
        CheckResult("balance-decomposition", "roots", cases, worst_decomp,
                    IDENTITY_TOL, worst_decomp <= IDENTITY_TOL),
        CheckResult("balance-two-forms", "roots", cases, worst_forms,
                    IDENTITY_TOL, worst_forms <= IDENTITY_TOL),
        CheckResult("derivative-positive-and-fd", "roots", cases, worst_deriv,
                    DERIVATIVE_TOL, deriv_positive and worst_deriv <= DERIVATIVE_TOL),
    ]


def _check_bounds(rng, cases) -> list[CheckResult]:
    worst_interval = 0.0
    worst_inv = 0.0
    for _ in range(cases):
        ms = random_masses(rng, 3)
        law = _law(rng)
        report = euler_alpha(ms, law)
        lo, hi = report.interval
        slack = 1e-9 * max(1.0, report.alpha)
        outside = max(lo - report.alpha, report.alpha - hi, 0.0)
        worst_interval = max(worst_interval, 0.0 if outside <= slack else outside)

        rev = euler_alpha(MassSystem(ms.masses[::-1].copy()), law)
        worst_inv = max(worst_inv, abs(rev.alpha * report.alpha - 1.0))
    return [
        CheckResult("alpha-in-case-interval", "bounds", cases, worst_interval,
                    0.0, worst_interval == 0.0),
        CheckResult("labeling-inversion", "bounds", cases, worst_inv,
                    INVERSION_TOL, worst_inv <= INVERSION_TOL),
    ]


_RUNNERS = {
    "kinetic": _check_kinetic,
    "multipliers": _check_multipliers,
    "threebody": _check_threebody,
    "roots": _check_roots,
    "bounds": _check_bounds,
}


def run_checks(
    seed: int = 12345, cases: int = 100, only: str | None = None
) -> list[CheckResult]:
    """Run the randomized identity suite.

    Args:
        seed: RNG seed; identical seeds reproduce the report exactly.
        cases: instances per check (the kinetic group uses this per body
            count).
        only: restrict to one group name from :data:`GROUPS`.
    """
    if only is not None and only not in _RUNNERS:
        raise ValueError(f"unknown check group {only!r}; choose from {GROUPS}")
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []
    for group in GROUPS:
        if only is not None and group != only:
            continue
        results.extend(_RUNNERS[group](rng, cases))
    return results
