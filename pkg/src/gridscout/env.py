"""Episode engine: action application, discovery bookkeeping, rewards.

The environment hides a ground-truth terrain behind a monotone discovery
mask. Each step moves the robot one cell, folds a sensor sweep into the
mask, and settles the reward: newly discovered cells minus a fixed move
penalty, a completion bonus of n = rows*cols when coverage reaches beta,
and a fatal penalty of -n for stepping off-grid or into an obstacle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any

import numpy as np

from ._kernels import sweep_discover
from .grid import Cell, ShapeMismatch, TerrainMap
from .sensing import sweep_tables

ROBOT_VALUE = 0.6
UNDISCOVERED_VALUE = 0.0


class StartBlocked(ValueError):
    """The configured start cell is an obstacle."""


class EpisodeFinished(RuntimeError):
    """step() was called after the episode terminated."""


class Action(IntEnum):
    """Von Neumann moves; one cell per step."""

    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3

    @property
    def letter(self) -> str:
        return _LETTERS[self]

    @classmethod
    def from_letter(cls, letter: str) -> "Action":
        try:
            return cls(_LETTERS.index(letter))
        except ValueError:
            raise ValueError(f"unknown action letter: {letter!r}") from None


# Row/col deltas indexed by Action value.
_DELTAS = ((-1, 0), (0, 1), (1, 0), (0, -1))
_LETTERS = ("N", "E", "S", "W")


class Termination(str, Enum):
    NONE = "none"
    INVALID = "invalid"
    COMPLETE = "complete"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class EnvConfig:
    """Episode parameters.

    max_steps of None resolves to 4*n, a cap generous enough that any
    sensible coverage run finishes first. seed identifies the episode for
    bookkeeping; the engine itself has no randomness.
    """

    shape: tuple[int, int] = (21, 21)
    sensor_radius: int = 6
    beta: float = 0.99
    r_move: float = 0.5
    bonuses_enabled: bool = True
    max_steps: int | None = None
    start: tuple[int, int] = (0, 0)
    seed: int = 0

    def __post_init__(self) -> None:
        rows, cols = self.shape
        if rows < 1 or cols < 1:
            raise ValueError(f"degenerate shape: {self.shape}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1]: {self.beta}")
        if self.sensor_radius < 0:
            raise ValueError(f"negative sensor radius: {self.sensor_radius}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1: {self.max_steps}")

    @property
    def n_cells(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def step_cap(self) -> int:
        return 4 * self.n_cells if self.max_steps is None else self.max_steps


class DiscoveryMask:
    """Per-cell has-been-sensed record with a cached true-count.

    Monotone by construction: there is no operation that clears a cell.
    """

    __slots__ = ("discovered", "count")

    def __init__(self, shape: tuple[int, int]):
        self.discovered = np.zeros(shape, dtype=bool)
        self.count = 0

    def fold(self, cells) -> int:
        """Mark cells discovered; returns how many were new."""
        newly = 0
        for cell in cells:
            if not self.discovered[cell]:
                self.discovered[cell] = True
                newly += 1
        self.count += newly
        return newly


@dataclass
class StepOutcome:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict[str, Any]


def encode_observation(terrain: TerrainMap, mask: DiscoveryMask, pose: Cell) -> np.ndarray:
    """Agent-visible grid: 0 undiscovered, 0.3 free, 1 obstacle, 0.6 robot."""
    out = np.where(mask.discovered, terrain.encoded(), UNDISCOVERED_VALUE)
    out[pose.row, pose.col] = ROBOT_VALUE
    return out


def normalized_score(total_reward: float, n: int) -> float:
    """Linear map sending -n to 0 and 2n to 1, clamped to [0, 1]."""
    return min(1.0, max(0.0, (total_reward + n) / (3.0 * n)))


class Environment:
    """Single-episode grid world; one owner at a time, no shared state.

    Deterministic: identical (config, terrain, action sequence) produce
    bit-identical outcomes. All per-step state lives in flat arrays so the
    sweep kernel can run allocation-free.
    """

    def __init__(self, config: EnvConfig | None = None):
        self.config = config or EnvConfig()
        rows, cols = self.config.shape
        self._rows = rows
        self._cols = cols
        self._n = rows * cols
        tables = sweep_tables(self.config.sensor_radius)
        self._tgt_r, self._tgt_c, self._ray_r, self._ray_c, self._ray_start = tables
        self._terrain: TerrainMap | None = None
        self._obstacles = np.zeros(self._n, dtype=np.uint8)
        self._encoded = np.zeros(self._n, dtype=np.float64)
        self._discovered = np.zeros(self._n, dtype=np.uint8)
        self._known = np.zeros(self._n, dtype=np.int8)
        self._obs = np.zeros(self._n, dtype=np.float64)
        self._obs2d = self._obs.reshape(rows, cols)
        self._done = True
        self._termination = Termination.NONE
        self._pr = 0
        self._pc = 0
        self._steps = 0
        self._distance = 0
        self._count = 0
        self._total_reward = 0.0

    # -- lifecycle ---------------------------------------------------------

    def reset(self, terrain: TerrainMap | None = None) -> np.ndarray:
        """Start a fresh episode; cells discovered here earn no reward."""
        if terrain is not None:
            if terrain.shape != self.config.shape:
                raise ShapeMismatch(
                    f"terrain {terrain.shape} vs config {self.config.shape}"
                )
            self._terrain = TerrainMap(terrain.obstacles.copy())
            self._obstacles = self._terrain.obstacles.astype(np.uint8).ravel()
            self._encoded = self._terrain.encoded().ravel()
        if self._terrain is None:
            raise ValueError("reset() needs a terrain on first call")
        sr, sc = self.config.start
        if not (0 <= sr < self._rows and 0 <= sc < self._cols):
            raise StartBlocked(f"start {self.config.start} is off-grid")
        if self._obstacles[sr * self._cols + sc]:
            raise StartBlocked(f"start {self.config.start} is an obstacle")
        self._discovered[:] = 0
        self._known[:] = 0
        self._obs[:] = UNDISCOVERED_VALUE
        self._pr = sr
        self._pc = sc
        self._steps = 0
        self._distance = 0
        self._total_reward = 0.0
        self._done = False
        self._termination = Termination.NONE
        self._count = sweep_discover(
            self._obstacles, self._discovered, self._known, self._obs,
            self._encoded, self._rows, self._cols, sr, sc,
            self._tgt_r, self._tgt_c, self._ray_r, self._ray_c, self._ray_start,
        )
        return self.observation()

    def step(self, action: Action | int) -> StepOutcome:
        if self._done:
            raise EpisodeFinished("episode already terminated; reset() first")
        dr, dc = _DELTAS[action]
        nr = self._pr + dr
        nc = self._pc + dc
        self._steps += 1
        cfg = self.config
        newly = 0
        if not (0 <= nr < self._rows and 0 <= nc < self._cols) or self._obstacles[nr * self._cols + nc]:
            # Fatal move: episode ends, robot stays put, no exploration gain.
            reward = -float(self._n) if cfg.bonuses_enabled else -cfg.r_move
            self._done = True
            self._termination = Termination.INVALID
        else:
            self._pr = nr
            self._pc = nc
            self._distance += 1
            newly = sweep_discover(
                self._obstacles, self._discovered, self._known, self._obs,
                self._encoded, self._rows, self._cols, nr, nc,
                self._tgt_r, self._tgt_c, self._ray_r, self._ray_c, self._ray_start,
            )
            self._count += newly
            reward = newly - cfg.r_move
            if self._count >= cfg.beta * self._n:
                if cfg.bonuses_enabled:
                    reward += self._n
                self._done = True
                self._termination = Termination.COMPLETE
            elif self._steps >= cfg.step_cap:
                self._done = True
                self._termination = Termination.STEP_LIMIT
        self._total_reward += reward
        info = {
            "newly_discovered": newly,
            "coverage": self._count / self._n,
            "distance_traveled": self._distance,
            "termination": self._termination,
        }
        return StepOutcome(self.observation(), reward, self._done, info)

    # -- views -------------------------------------------------------------

    def observation(self) -> np.ndarray:
        out = self._obs2d.copy()
        out[self._pr, self._pc] = ROBOT_VALUE
        return out

    def valid_actions(self) -> list[Action]:
        """Actions that do not terminate the episode (ground-truth check)."""
        out = []
        for action in Action:
            dr, dc = _DELTAS[action]
            nr = self._pr + dr
            nc = self._pc + dc
            if 0 <= nr < self._rows and 0 <= nc < self._cols and not self._obstacles[nr * self._cols + nc]:
                out.append(action)
        return out

    def discovered_grid(self) -> np.ndarray:
        return self._discovered.reshape(self.config.shape).astype(bool)

    def known_grid(self) -> np.ndarray:
        """Belief states: 0 unknown, 1 known-free, 2 known-obstacle."""
        return self._known.reshape(self.config.shape).copy()

    @property
    def mask(self) -> DiscoveryMask:
        out = DiscoveryMask(self.config.shape)
        out.discovered = self.discovered_grid()
        out.count = self._count
        return out

    @property
    def terrain(self) -> TerrainMap | None:
        return self._terrain

    @property
    def pose(self) -> Cell:
        return Cell(self._pr, self._pc)

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def distance(self) -> int:
        return self._distance

    @property
    def total_reward(self) -> float:
        return self._total_reward

    @property
    def discovered_count(self) -> int:
        return self._count

    @property
    def coverage(self) -> float:
        return self._count / self._n

    @property
    def done(self) -> bool:
        return self._done

    @property
    def termination(self) -> Termination:
        return self._termination
