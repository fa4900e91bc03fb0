"""JSON round-tripping for states, schedules and resources."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bases import AngleSchedule
from .qcore import as_state, num_qubits


def state_to_dict(state: np.ndarray) -> dict:
    return {
        "num_qubits": num_qubits(state),
        "amps": [[float(z.real), float(z.imag)] for z in state],
    }


def state_from_dict(data: dict) -> np.ndarray:
    try:
        m = int(data["num_qubits"])
        amps = data["amps"]
    except (KeyError, TypeError) as exc:
        raise ValueError("state JSON needs 'num_qubits' and 'amps'") from exc
    if len(amps) != 2**m:
        raise ValueError(f"expected {2**m} amplitudes for {m} qubits, got {len(amps)}")
    try:
        psi = np.array([complex(float(re), float(im)) for re, im in amps])
    except (TypeError, ValueError) as exc:
        raise ValueError("amplitudes must be [re, im] pairs") from exc
    return as_state(psi)


def load_state(path: str | Path) -> np.ndarray:
    return state_from_dict(json.loads(Path(path).read_text()))


def save_state(state: np.ndarray, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2) + "\n")


def load_schedules(path: str | Path) -> tuple[AngleSchedule | None, AngleSchedule | None]:
    """Read a schedule file.

    Either a single schedule (``{"n", "levels"}``, used for both sides) or a
    pair keyed ``"a"`` and ``"b"``.
    """
    data = json.loads(Path(path).read_text())
    if "levels" in data:
        sched = AngleSchedule.from_dict(data)
        return sched, sched
    a = AngleSchedule.from_dict(data["a"]) if "a" in data else None
    b = AngleSchedule.from_dict(data["b"]) if "b" in data else None
    if a is None and b is None:
        raise ValueError(f"{path}: no schedule found (expected 'levels' or 'a'/'b' keys)")
    return a, b


def load_schedule(path: str | Path) -> AngleSchedule:
    return AngleSchedule.from_dict(json.loads(Path(path).read_text()))
