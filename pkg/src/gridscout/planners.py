"""Non-learning exploration policies over discovered information only.

Planning state is a Belief: the discovery mask, a per-cell known/unknown
classification, and the robot pose. Policies never see the ground-truth
terrain; unknown cells are treated as non-traversable, so a policy output
can never walk the robot into a surprise obstacle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ._kernels import (
    KNOWN_FREE,
    KNOWN_OBSTACLE,
    UNKNOWN,
    UNREACHED,
    bfs_distances,
    first_action_toward,
    select_frontier,
)
from .env import Action, Environment
from .grid import Cell
from .sensing import sweep_tables


class NoReachableFrontier(RuntimeError):
    """Every remaining unknown region is sealed off from the robot."""


class ScriptExhausted(RuntimeError):
    """A scripted policy ran out of actions."""


@dataclass
class Belief:
    """What the robot knows: mask, per-cell classification, own pose."""

    mask: np.ndarray  # bool, true where sensed
    known: np.ndarray  # int8: 0 unknown, 1 free, 2 obstacle
    pose: Cell

    @classmethod
    def from_env(cls, env: Environment) -> "Belief":
        return cls(env.discovered_grid(), env.known_grid(), env.pose)

    @property
    def shape(self) -> tuple[int, int]:
        return self.known.shape


@dataclass
class Frontier:
    """A known-free cell bordering the unknown; costs filled by policies."""

    cell: Cell
    path_cost: int | None = None
    info_gain: int | None = None


Policy = Callable[[Belief], Action]


def detect_frontiers(belief: Belief) -> list[Frontier]:
    """Known-free cells with at least one unknown 4-neighbor, row-major."""
    known = belief.known
    unknown = known == UNKNOWN
    adj = np.zeros_like(unknown)
    adj[1:, :] |= unknown[:-1, :]
    adj[:-1, :] |= unknown[1:, :]
    adj[:, 1:] |= unknown[:, :-1]
    adj[:, :-1] |= unknown[:, 1:]
    cells = np.argwhere((known == KNOWN_FREE) & adj)
    return [Frontier(Cell(int(r), int(c))) for r, c in cells]


def shortest_path(belief: Belief, frm: Cell, to: Cell) -> list[Action] | None:
    """Minimum-length path through known-free cells, or None if unreachable.

    Among equal-length paths, picks the one preferring at every junction
    the action earliest in (N, E, S, W): breadth-first distances are
    computed from the target and the walk descends them greedily.
    """
    rows, cols = belief.shape
    known = np.ascontiguousarray(belief.known, dtype=np.int8).ravel()
    if known[frm.row * cols + frm.col] != KNOWN_FREE:
        return None
    if known[to.row * cols + to.col] != KNOWN_FREE:
        return None
    if frm == to:
        return []
    dist = np.full(rows * cols, UNREACHED, dtype=np.int64)
    queue = np.empty(rows * cols, dtype=np.int64)
    bfs_distances(known, rows, cols, to.row, to.col, dist, queue)
    here = dist[frm.row * cols + frm.col]
    if here == UNREACHED:
        return None
    path: list[Action] = []
    r, c = frm.row, frm.col
    while (r, c) != (to.row, to.col):
        want = dist[r * cols + c] - 1
        if r > 0 and dist[(r - 1) * cols + c] == want:
            path.append(Action.NORTH)
            r -= 1
        elif c < cols - 1 and dist[r * cols + c + 1] == want:
            path.append(Action.EAST)
            c += 1
        elif r < rows - 1 and dist[(r + 1) * cols + c] == want:
            path.append(Action.SOUTH)
            r += 1
        else:
            path.append(Action.WEST)
            c -= 1
    return path


def _next_action(belief: Belief, utility_mode: int, sensor_radius: int,
                 dist: np.ndarray | None = None,
                 queue: np.ndarray | None = None) -> Action:
    rows, cols = belief.shape
    n = rows * cols
    known = np.ascontiguousarray(belief.known, dtype=np.int8).ravel()
    if dist is None:
        dist = np.empty(n, dtype=np.int64)
    if queue is None:
        queue = np.empty(n, dtype=np.int64)
    tgt_r, tgt_c, _, _, _ = sweep_tables(sensor_radius)
    target = select_frontier(
        known, rows, cols, belief.pose.row, belief.pose.col,
        utility_mode, tgt_r, tgt_c, dist, queue,
    )
    if target < 0:
        raise NoReachableFrontier("no reachable frontier cell")
    action = first_action_toward(
        known, rows, cols, belief.pose.row, belief.pose.col, target, dist, queue,
    )
    assert action >= 0
    return Action(action)


def cost_policy_next(belief: Belief) -> Action:
    """First move toward the nearest reachable frontier (row-major ties)."""
    return _next_action(belief, 0, 0)


def utility_policy_next(belief: Belief, d: int) -> Action:
    """First move toward the frontier maximizing info_gain / (1 + cost).

    info_gain counts unknown cells within Euclidean distance d of the
    frontier, ignoring occlusion. Ties break row-major. The whole field is
    recomputed from scratch on every call.
    """
    return _next_action(belief, 1, d)


def _frontier_policy(utility_mode: int, sensor_radius: int) -> Policy:
    scratch: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def policy(belief: Belief) -> Action:
        n = belief.shape[0] * belief.shape[1]
        if belief.shape not in scratch:
            scratch[belief.shape] = (
                np.empty(n, dtype=np.int64),
                np.empty(n, dtype=np.int64),
            )
        dist, queue = scratch[belief.shape]
        return _next_action(belief, utility_mode, sensor_radius, dist, queue)

    return policy


def _random_policy(seed: int | None) -> Policy:
    rng = np.random.default_rng(seed)

    def policy(belief: Belief) -> Action:
        rows, cols = belief.shape
        r, c = belief.pose
        candidates = []
        for action in Action:
            dr, dc = ((-1, 0), (0, 1), (1, 0), (0, -1))[action]
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and belief.known[nr, nc] != KNOWN_OBSTACLE:
                candidates.append(action)
        if not candidates:
            return Action.NORTH
        return candidates[int(rng.integers(len(candidates)))]

    return policy


def _scripted_policy(path: str) -> Policy:
    tokens = Path(path).read_text().split()
    actions = iter([Action.from_letter(t) for t in tokens])

    def policy(belief: Belief) -> Action:
        try:
            return next(actions)
        except StopIteration:
            raise ScriptExhausted(f"script {path} ran out of actions") from None

    return policy


def make_policy(name: str, *, sensor_radius: int = 6, seed: int | None = None) -> Policy:
    """Resolve a policy by name: cost, utility, random, scripted:<file>."""
    if name == "cost":
        return _frontier_policy(0, 0)
    if name == "utility":
        return _frontier_policy(1, sensor_radius)
    if name == "random":
        return _random_policy(seed)
    if name.startswith("scripted:"):
        return _scripted_policy(name.split(":", 1)[1])
    raise ValueError(f"unknown policy: {name!r}")
