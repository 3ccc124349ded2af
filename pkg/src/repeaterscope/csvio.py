"""Report rows in the shared CSV schema.

One fixed column order for every architecture; cells that do not apply to
a row stay empty.  Floats are written with ``repr`` so that re-parsing
recovers the exact same values; identical inputs therefore produce
byte-identical files.  Trailing ``reset_f<i>`` columns hold the per-level
unconditional abort probabilities up to the deepest chain in the file.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .twoway import RunReport

BASE_COLUMNS = (
    "experiment",
    "architecture",
    "distance_km",
    "n_segments",
    "channels",
    "eta_c",
    "eps_g",
    "xi",
    "t2_s",
    "rule",
    "f_th",
    "schedule",
    "skr_per_burst",
    "skr_per_channel_use",
    "fidelity",
    "secret_fraction",
    "expected_pairs",
    "repeaters",
    "qubits",
    "gates",
    "measurements",
    "qubits_per_key",
    "gates_per_key",
    "measurements_per_key",
)

_FLOAT_COLUMNS = {
    "distance_km", "eta_c", "eps_g", "xi", "t2_s", "f_th",
    "skr_per_burst", "skr_per_channel_use", "fidelity", "secret_fraction",
    "expected_pairs", "gates", "measurements",
    "qubits_per_key", "gates_per_key", "measurements_per_key",
}
_INT_COLUMNS = {"n_segments", "channels", "repeaters", "qubits"}


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_row(report: RunReport, experiment: str, config_label: str | None = None) -> dict:
    """Flatten a RunReport into schema cells.

    ``config_label`` overrides the schedule cell for architectures whose
    configuration is not a schedule (e.g. parity codes).
    """
    schedule = report.schedule.serialize() if report.schedule is not None else ""
    row = {
        "experiment": experiment,
        "architecture": report.architecture,
        "distance_km": report.distance_km,
        "n_segments": report.n_segments,
        "channels": report.channels,
        "eta_c": report.eta_c,
        "eps_g": report.eps_g,
        "xi": report.xi,
        "t2_s": report.t2_s,
        "rule": report.rule,
        "f_th": report.f_th,
        "schedule": config_label if config_label is not None else schedule,
        "skr_per_burst": report.skr_per_burst,
        "skr_per_channel_use": report.skr_per_channel_use,
        "fidelity": report.fidelity,
        "secret_fraction": report.secret_fraction,
        "expected_pairs": report.expected_pairs,
        "repeaters": report.costs.repeaters,
        "qubits": report.costs.qubits_per_burst,
        "gates": report.costs.two_qubit_gates,
        "measurements": report.costs.measurements,
        "qubits_per_key": report.costs.qubits_per_key,
        "gates_per_key": report.costs.gates_per_key,
        "measurements_per_key": report.costs.measurements_per_key,
    }
    if report.reset_profile is not None:
        for i, f_i in enumerate(report.reset_profile.f):
            row[f"reset_f{i}"] = float(f_i)
    return row


def write_rows(path, rows: list[dict]) -> None:
    """Write rows under the fixed header; newline '\\n', UTF-8, '.' decimals."""
    n_resets = 0
    for row in rows:
        while f"reset_f{n_resets}" in row:
            n_resets += 1
    columns = list(BASE_COLUMNS) + [f"reset_f{i}" for i in range(n_resets)]
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: fmt(row.get(col)) for col in columns})
    Path(path).write_text(buffer.getvalue(), encoding="utf-8", newline="")


def read_rows(path) -> list[dict]:
    """Read a schema CSV back with numeric cells re-typed."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        rows = []
        for raw in reader:
            row: dict = {}
            for key, cell in raw.items():
                if cell == "" or cell is None:
                    row[key] = None
                elif key in _INT_COLUMNS:
                    row[key] = int(cell)
                elif key in _FLOAT_COLUMNS or key.startswith("reset_f"):
                    row[key] = float(cell)
                else:
                    row[key] = cell
            rows.append(row)
        return rows


def is_finite_positive(value) -> bool:
    return value is not None and isinstance(value, float) and math.isfinite(value) and value > 0
