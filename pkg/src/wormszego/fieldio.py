"""Plain-text field files with a JSON grid sidecar.

A field file is one header line ``sheet,k,m,re,im`` followed by one row per
sample (sheet in 1..4, k the x index, m the theta index).  Grid metadata
lives next to it in ``<path>.grid.json`` with keys beta, x_min, x_max, n, M.
Diffable and language-neutral; zero rows may be omitted on write.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .transforms import BoundaryField, Grid2D

__all__ = ["save_field", "load_field", "sidecar_path"]

HEADER = "sheet,k,m,re,im"


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".grid.json")


def save_field(path: str | Path, field: BoundaryField, beta: float, skip_zeros: bool = True) -> None:
    path = Path(path)
    grid = field.grid
    meta = {
        "beta": beta,
        "x_min": grid.log.x_min,
        "x_max": grid.log.x_max,
        "n": grid.log.n,
        "M": grid.ang.m_count,
    }
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")
    with path.open("w") as fh:
        fh.write(HEADER + "\n")
        for sheet in range(4):
            sheet_data = field.data[sheet]
            if skip_zeros and not np.any(sheet_data):
                continue
            for k in range(sheet_data.shape[0]):
                row = sheet_data[k]
                if skip_zeros and not np.any(row):
                    continue
                for m in range(row.shape[0]):
                    z = row[m]
                    if skip_zeros and z == 0:
                        continue
                    fh.write(f"{sheet + 1},{k},{m},{z.real!r},{z.imag!r}\n")


def load_field(path: str | Path) -> tuple[BoundaryField, float]:
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    grid = Grid2D.make(meta["x_min"], meta["x_max"], int(meta["n"]), int(meta["M"]))
    field = BoundaryField.zeros(grid)
    with path.open() as fh:
        header = fh.readline().strip()
        if header != HEADER:
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sheet_s, k_s, m_s, re_s, im_s = line.split(",")
            field.data[int(sheet_s) - 1, int(k_s), int(m_s)] = float(re_s) + 1j * float(im_s)
    return field, float(meta["beta"])
