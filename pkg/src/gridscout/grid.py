"""Shared grid primitives: cells and ground-truth terrain maps."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

FREE_VALUE = 0.3
OBSTACLE_VALUE = 1.0


class Cell(NamedTuple):
    """A grid coordinate, 0-indexed, row-major."""

    row: int
    col: int


class ShapeMismatch(ValueError):
    """Two grid-shaped objects disagree on (rows, cols)."""


class TerrainMap:
    """Ground-truth obstacle layout of the hidden world.

    ``obstacles`` is a boolean (rows, cols) array; True marks a
    non-traversable cell.
    """

    __slots__ = ("obstacles",)

    def __init__(self, obstacles: np.ndarray):
        obstacles = np.asarray(obstacles, dtype=bool)
        if obstacles.ndim != 2:
            raise ValueError(f"terrain must be 2-D, got shape {obstacles.shape}")
        self.obstacles = obstacles

    @classmethod
    def empty(cls, shape: tuple[int, int]) -> "TerrainMap":
        return cls(np.zeros(shape, dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return self.obstacles.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self.obstacles.shape[0]

    @property
    def cols(self) -> int:
        return self.obstacles.shape[1]

    @property
    def n_cells(self) -> int:
        return self.obstacles.size

    def is_obstacle(self, cell: tuple[int, int]) -> bool:
        return bool(self.obstacles[cell])

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols

    def encoded(self) -> np.ndarray:
        """Per-cell morphology values: FREE_VALUE for free, OBSTACLE_VALUE for obstacle."""
        return np.where(self.obstacles, OBSTACLE_VALUE, FREE_VALUE)

    def to_text(self) -> str:
        """Serialize as a header line "rows cols" plus one '.'/'#' line per row."""
        lines = [f"{self.rows} {self.cols}"]
        for row in self.obstacles:
            lines.append("".join("#" if v else "." for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TerrainMap":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty terrain text")
        try:
            rows, cols = (int(tok) for tok in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad terrain header {lines[0]!r}") from exc
        if len(lines) - 1 != rows:
            raise ValueError(f"expected {rows} rows, got {len(lines) - 1}")
        grid = np.zeros((rows, cols), dtype=bool)
        for i, line in enumerate(lines[1:]):
            if len(line) != cols:
                raise ValueError(f"row {i} has {len(line)} cells, expected {cols}")
            for j, ch in enumerate(line):
                if ch == "#":
                    grid[i, j] = True
                elif ch != ".":
                    raise ValueError(f"bad terrain character {ch!r} at row {i}")
        return cls(grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TerrainMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.obstacles, other.obstacles))

    def __repr__(self) -> str:
        return f"TerrainMap(shape={self.shape}, obstacles={int(self.obstacles.sum())})"
