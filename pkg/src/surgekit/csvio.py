"""Deterministic CSV emission.

Numbers are written with 9 significant digits so repeated runs produce
byte-identical files; the header row is always present.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

from .errors import DomainError
from .odesim import Trajectory


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    return f"{float(v):.9g}"


def write_rows(header: Sequence[str], rows: Iterable[Sequence], path) -> None:
    """Write one header row plus data rows as comma-separated text."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise DomainError(
                f"row width {len(row)} does not match header {header}")
        lines.append(",".join(format_value(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def write_trajectory(traj: Trajectory, path, decimate: int = 1) -> None:
    """Trajectory CSV: column 't' first, then the recorded signals."""
    if decimate < 1:
        raise DomainError(f"decimation factor must be >= 1, got {decimate}")
    write_rows(traj.columns, traj.samples[::decimate], path)


def _write_text(path, text: str) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
