"""Deterministic CSV output: header row, 17 significant digits, LF endings."""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["write_csv", "read_csv"]


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, columns: dict) -> Path:
    """Write equal-length real columns; the dict order is the column order."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[k], dtype=float).ravel() for k in names]
    n = {c.size for c in cols}
    if len(n) != 1:
        raise ValueError(f"column lengths differ: { {k: c.size for k, c in zip(names, cols)} }")
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(names)]
    lines += [",".join(_fmt(v) for v in row) for row in zip(*cols)]
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}
