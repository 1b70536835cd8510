"""Uniform-grid spatial hash for 2D neighbor queries.

Cell size should be at least the largest query radius so a query only has
to inspect the 3x3 block of cells around the query point.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .errors import InvalidInputError


class UniformGrid2D:
    def __init__(self, cell_size: float):
        if cell_size <= 0:
            raise InvalidInputError(f"cell_size must be > 0, got {cell_size}")
        self.cell_size = float(cell_size)
        self._cells: dict[tuple[int, int], list[int]] = defaultdict(list)
        self._points: np.ndarray | None = None

    def build(self, points: np.ndarray) -> None:
        """Index an (N, 2) array of points; indices into it are the query results."""
        points = np.asarray(points, dtype=float)
        self._points = points
        self._cells.clear()
        if points.size == 0:
            return
        keys = np.floor(points / self.cell_size).astype(np.int64)
        for i, (cx, cy) in enumerate(keys):
            self._cells[(int(cx), int(cy))].append(i)

    def query(self, position, radius: float) -> list[int]:
        """Indices of all points within `radius` (inclusive) of position."""
        if radius < 0:
            raise InvalidInputError(f"radius must be >= 0, got {radius}")
        if radius > self.cell_size:
            raise InvalidInputError(
                f"radius {radius} exceeds grid support (cell size {self.cell_size})"
            )
        if self._points is None or self._points.size == 0:
            return []
        x, y = float(position[0]), float(position[1])
        cx = int(np.floor(x / self.cell_size))
        cy = int(np.floor(y / self.cell_size))
        candidates: list[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                candidates.extend(self._cells.get((cx + dx, cy + dy), ()))
        if not candidates:
            return []
        pts = self._points[candidates]
        d2 = (pts[:, 0] - x) ** 2 + (pts[:, 1] - y) ** 2
        r2 = radius * radius
        return [candidates[i] for i in np.nonzero(d2 <= r2)[0]]
