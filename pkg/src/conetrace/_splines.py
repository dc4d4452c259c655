"""Vectorized per-row cubic splines on a shared abscissa grid.

Tables here hold one smooth profile per sphere direction, all sampled on
the same s-grid.  scipy's CubicSpline builds every row in one shot; this
wrapper adds gather-style evaluation where each queried point may address a
different row, which is what the backprojection sums need.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = ["RowSplines"]


class RowSplines:
    """Cubic interpolants of values[r, k] over grid[k], one per row r.

    Queries outside [grid[0], grid[-1]] clamp to zero, matching profiles
    that vanish identically beyond the tabulated range.
    """

    def __init__(self, grid: np.ndarray, values: np.ndarray):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != grid.shape[0]:
            raise ValueError("values must be (rows, len(grid))")
        self.grid = grid
        self.values = values
        spline = CubicSpline(grid, values.T, axis=0)
        self.coeffs = spline.c  # (4, len(grid)-1, rows)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    def __call__(self, row_idx, s):
        """Evaluate spline of row_idx[i] at s[i]; zero outside the grid."""
        row_idx = np.asarray(row_idx, dtype=int)
        s = np.asarray(s, dtype=float)
        row_idx, s = np.broadcast_arrays(row_idx, s)
        shape = s.shape
        row_idx = row_idx.ravel()
        s = s.ravel()
        lo, hi = self.grid[0], self.grid[-1]
        inside = (s >= lo) & (s <= hi)
        out = np.zeros(s.shape[0])
        if inside.any():
            sv = s[inside]
            rv = row_idx[inside]
            cell = np.searchsorted(self.grid, sv, side="right") - 1
            cell = np.clip(cell, 0, len(self.grid) - 2)
            t = sv - self.grid[cell]
            c = self.coeffs[:, cell, rv]
            out[inside] = ((c[0] * t + c[1]) * t + c[2]) * t + c[3]
        return out.reshape(shape)

    def eval_rows(self, s: float) -> np.ndarray:
        """All rows at one abscissa (used for whole-sphere sums)."""
        return self(np.arange(self.rows), np.full(self.rows, float(s)))
