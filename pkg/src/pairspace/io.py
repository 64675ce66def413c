"""File formats: initial-condition JSON, trajectory CSV, report JSON.

Initial conditions accept either body coordinates,

    {"masses": [m1, ...], "bodies": [{"r": [x,y,z], "v": [x,y,z]}, ...]}

or pair coordinates,

    {"masses": [...], "pairs": {"R": [...], "Rdot": [...],
                                "q": {"12": [x,y,z], ...},
                                "qdot": {"12": [x,y,z], ...}}}

Pair keys are 1-based "ij" digit strings with i < j (bodies are numbered
from 1 in every user-facing format).  Unknown keys are rejected.

All numeric output is written with shortest round-trip float formatting
and sorted JSON keys, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO, Any

import numpy as np

from .core import BodyState, MassSystem, PairState, bodies_to_pairs, pair_index_list
from .central import CollinearReport
from .errors import ValidationError

__all__ = [
    "load_initial_conditions",
    "parse_initial_conditions",
    "pair_key",
    "write_trajectory_csv",
    "write_body_trajectory_csv",
    "collinear_report_dict",
    "write_json",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = [
    "m1", "m2", "m3", "n", "alpha", "case", "lo", "hi",
    "sigma1", "sigma2", "sigma3", "tau1", "tau2", "tau3",
]


def pair_key(i: int, j: int) -> str:
    """User-facing key for canonical 0-based pair (i, j): 1-based digits."""
    return f"{i + 1}{j + 1}"


def _fmt(x: float) -> str:
    return repr(float(x))


def _vector(value: Any, where: str) -> list[float]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise ValidationError(f"{where}: expected a 3-component number list")
    return [float(c) for c in value]


def _masses(value: Any) -> list[float]:
    if (
        not isinstance(value, list)
        or len(value) < 2
        or not all(isinstance(m, (int, float)) and not isinstance(m, bool) for m in value)
    ):
        raise ValidationError("masses: expected a list of at least two numbers")
    if any(not m > 0 for m in value):
        raise ValidationError("masses: all entries must be positive")
    return [float(m) for m in value]


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown keys {sorted(unknown)}")


def _parse_pair_key(key: str, n: int) -> tuple[int, int]:
    digits = key.split("-") if "-" in key else list(key)
    try:
        i, j = (int(d) for d in digits)
    except (ValueError, TypeError):
        raise ValidationError(f"pairs: bad pair key {key!r}") from None
    if not (1 <= i < j <= n):
        raise ValidationError(
            f"pairs: key {key!r} must name bodies 1..{n} with i < j"
        )
    return i - 1, j - 1


def _pair_block(block: Any, n: int, where: str) -> np.ndarray:
    pairs = pair_index_list(n)
    if not isinstance(block, dict):
        raise ValidationError(f"{where}: expected an object of pair vectors")
    rows = np.zeros((len(pairs), 3))
    seen = set()
    for key, value in block.items():
        ij = _parse_pair_key(str(key), n)
        if ij in seen:
            raise ValidationError(f"{where}: duplicate pair {key!r}")
        seen.add(ij)
        rows[pairs.index(ij)] = _vector(value, f"{where}[{key}]")
    missing = [pair_key(*p) for p in pairs if p not in seen]
    if missing:
        raise ValidationError(f"{where}: missing pairs {missing}")
    return rows


def parse_initial_conditions(data: Any) -> tuple[MassSystem, PairState]:
    """Validate a decoded initial-conditions document.

    Body input is converted through the exact coordinate map, so the
    returned pair state is realizable by construction; pair input is
    returned as given (realizability is the simulation's precondition,
    checked there).
    """
    if not isinstance(data, dict):
        raise ValidationError("top level: expected a JSON object")
    _reject_unknown(data, {"masses", "bodies", "pairs"}, "top level")
    if "masses" not in data:
        raise ValidationError("top level: missing 'masses'")
    masses = _masses(data["masses"])
    ms = MassSystem(masses)
    has_bodies = "bodies" in data
    has_pairs = "pairs" in data
    if has_bodies == has_pairs:
        raise ValidationError("top level: provide exactly one of 'bodies' or 'pairs'")

    if has_bodies:
        bodies = data["bodies"]
        if not isinstance(bodies, list) or len(bodies) != len(masses):
            raise ValidationError("bodies: expected one entry per mass")
        r, v = [], []
        for k, entry in enumerate(bodies):
            if not isinstance(entry, dict):
                raise ValidationError(f"bodies[{k}]: expected an object")
            _reject_unknown(entry, {"r", "v"}, f"bodies[{k}]")
            if "r" not in entry or "v" not in entry:
                raise ValidationError(f"bodies[{k}]: needs 'r' and 'v'")
            r.append(_vector(entry["r"], f"bodies[{k}].r"))
            v.append(_vector(entry["v"], f"bodies[{k}].v"))
        return ms, bodies_to_pairs(BodyState(r, v), ms)

    block = data["pairs"]
    if not isinstance(block, dict):
        raise ValidationError("pairs: expected an object")
    _reject_unknown(block, {"R", "Rdot", "q", "qdot"}, "pairs")
    for key in ("R", "Rdot", "q", "qdot"):
        if key not in block:
            raise ValidationError(f"pairs: missing {key!r}")
    if ms.n_bodies > 9:
        raise ValidationError("pairs: digit pair keys support at most 9 bodies")
    R = _vector(block["R"], "pairs.R")
    Rdot = _vector(block["Rdot"], "pairs.Rdot")
    q = _pair_block(block["q"], ms.n_bodies, "pairs.q")
    qdot = _pair_block(block["qdot"], ms.n_bodies, "pairs.qdot")
    return ms, PairState(R, Rdot, q, qdot)


def load_initial_conditions(path: str | Path) -> tuple[MassSystem, PairState]:
    """Read and validate an initial-conditions JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_initial_conditions(data)


def _trajectory_header(ms: MassSystem) -> list[str]:
    cols = ["t"]
    cols += [f"R.{c}" for c in "xyz"]
    cols += [f"Rdot.{c}" for c in "xyz"]
    for i, j in ms.pairs:
        cols += [f"q{pair_key(i, j)}.{c}" for c in "xyz"]
    for i, j in ms.pairs:
        cols += [f"qdot{pair_key(i, j)}.{c}" for c in "xyz"]
    cols += ["E_pair", "tri_residual"]
    return cols


def write_trajectory_csv(traj, ms: MassSystem, out: IO[str] | str | Path) -> None:
    """Pair trajectory samples as CSV, one row per sample."""
    own = isinstance(out, (str, Path))
    fh = open(out, "w", newline="") if own else out
    try:
        writer = csv.writer(fh)
        writer.writerow(_trajectory_header(ms))
        for s in traj.samples:
            st = s.state
            row = [_fmt(s.time)]
            row += [_fmt(c) for c in st.R]
            row += [_fmt(c) for c in st.Rdot]
            row += [_fmt(c) for c in st.q.ravel()]
            row += [_fmt(c) for c in st.qdot.ravel()]
            row += [_fmt(s.diagnostics.pair_energy), _fmt(s.diagnostics.triangle_residual)]
            writer.writerow(row)
    finally:
        if own:
            fh.close()


def write_body_trajectory_csv(traj, ms: MassSystem, out: IO[str] | str | Path) -> None:
    """Body trajectory samples as CSV with r_i / rdot_i columns."""
    own = isinstance(out, (str, Path))
    fh = open(out, "w", newline="") if own else out
    try:
        writer = csv.writer(fh)
        cols = ["t"]
        for i in range(ms.n_bodies):
            cols += [f"r{i + 1}.{c}" for c in "xyz"]
        for i in range(ms.n_bodies):
            cols += [f"rdot{i + 1}.{c}" for c in "xyz"]
        cols += ["E"]
        writer.writerow(cols)
        for s in traj.samples:
            row = [_fmt(s.time)]
            row += [_fmt(c) for c in s.state.r.ravel()]
            row += [_fmt(c) for c in s.state.rdot.ravel()]
            row += [_fmt(s.diagnostics.energy)]
            writer.writerow(row)
    finally:
        if own:
            fh.close()


def collinear_report_dict(report: CollinearReport) -> dict:
    """Flat JSON-ready view of a collinear solve."""
    out = {
        "m1": report.masses[0],
        "m2": report.masses[1],
        "m3": report.masses[2],
        "n": report.exponent,
        "alpha": report.alpha,
        "case": report.case_id,
        "lo": report.interval[0],
        "hi": report.interval[1],
        "x_L": report.x_L,
        "bracket_lo": report.bracket[0],
        "bracket_hi": report.bracket[1],
    }
    for k in (1, 2, 3):
        out[f"sigma{k}"] = report.sigma[k]
        out[f"tau{k}"] = report.tau[k]
    return out


def write_json(obj: dict, out: IO[str] | str | Path) -> None:
    """Deterministic JSON: sorted keys, newline-terminated."""
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)
