"""JIT-compiled hot loops: visibility sweeps and grid BFS.

Everything here operates on flat row-major arrays so the simulator can
sustain the headline step throughput. Falls back to plain Python if numba
is unavailable (functionally identical, far slower).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

# Belief cell states shared with the planners.
UNKNOWN = 0
KNOWN_FREE = 1
KNOWN_OBSTACLE = 2

UNREACHED = -1


@njit(cache=True)
def sweep_visible(obstacles, flags, rows, cols, pr, pc, tgt_r, tgt_c, ray_r, ray_c, ray_start):
    """Mark visible-from-(pr,pc) cells in ``flags``; returns the visible count."""
    count = 0
    for k in range(tgt_r.shape[0]):
        tr = pr + tgt_r[k]
        tc = pc + tgt_c[k]
        if tr < 0 or tr >= rows or tc < 0 or tc >= cols:
            continue
        blocked = False
        for m in range(ray_start[k], ray_start[k + 1]):
            if obstacles[(pr + ray_r[m]) * cols + (pc + ray_c[m])]:
                blocked = True
                break
        if not blocked:
            flags[tr * cols + tc] = 1
            count += 1
    return count


@njit(cache=True)
def sweep_discover(obstacles, discovered, known, obs, encoded, rows, cols, pr, pc,
                   tgt_r, tgt_c, ray_r, ray_c, ray_start):
    """Fold one sweep into the discovery mask; returns the newly-seen count.

    Keeps the derived per-cell views in sync: ``known`` (belief states) and
    ``obs`` (terrain encoding where discovered).
    """
    newly = 0
    for k in range(tgt_r.shape[0]):
        tr = pr + tgt_r[k]
        tc = pc + tgt_c[k]
        if tr < 0 or tr >= rows or tc < 0 or tc >= cols:
            continue
        blocked = False
        for m in range(ray_start[k], ray_start[k + 1]):
            if obstacles[(pr + ray_r[m]) * cols + (pc + ray_c[m])]:
                blocked = True
                break
        if blocked:
            continue
        idx = tr * cols + tc
        if discovered[idx] == 0:
            discovered[idx] = 1
            obs[idx] = encoded[idx]
            if obstacles[idx]:
                known[idx] = KNOWN_OBSTACLE
            else:
                known[idx] = KNOWN_FREE
            newly += 1
    return newly


@njit(cache=True)
def bfs_distances(known, rows, cols, sr, sc, dist, queue):
    """4-connected BFS over KNOWN_FREE cells from (sr, sc).

    ``dist`` must be pre-filled with UNREACHED; ``queue`` is an int64 scratch
    buffer of at least rows*cols entries.
    """
    start = sr * cols + sc
    dist[start] = 0
    queue[0] = start
    head = 0
    tail = 1
    while head < tail:
        idx = queue[head]
        head += 1
        r = idx // cols
        c = idx % cols
        nd = dist[idx] + 1
        # N, E, S, W
        if r > 0:
            j = idx - cols
            if dist[j] == UNREACHED and known[j] == KNOWN_FREE:
                dist[j] = nd
                queue[tail] = j
                tail += 1
        if c < cols - 1:
            j = idx + 1
            if dist[j] == UNREACHED and known[j] == KNOWN_FREE:
                dist[j] = nd
                queue[tail] = j
                tail += 1
        if r < rows - 1:
            j = idx + cols
            if dist[j] == UNREACHED and known[j] == KNOWN_FREE:
                dist[j] = nd
                queue[tail] = j
                tail += 1
        if c > 0:
            j = idx - 1
            if dist[j] == UNREACHED and known[j] == KNOWN_FREE:
                dist[j] = nd
                queue[tail] = j
                tail += 1


@njit(cache=True)
def _is_frontier(known, rows, cols, idx):
    r = idx // cols
    c = idx % cols
    if r > 0 and known[idx - cols] == UNKNOWN:
        return True
    if c < cols - 1 and known[idx + 1] == UNKNOWN:
        return True
    if r < rows - 1 and known[idx + cols] == UNKNOWN:
        return True
    if c > 0 and known[idx - 1] == UNKNOWN:
        return True
    return False


@njit(cache=True)
def select_frontier(known, rows, cols, pr, pc, utility_mode, tgt_r, tgt_c, dist, queue):
    """Pick the exploration target for the current belief.

    Cost mode (utility_mode=0): the reachable frontier with minimum path
    cost. Utility mode (1): the reachable frontier maximizing
    info_gain / (1 + path_cost) where info_gain counts unknown cells within
    the sensing disk (tgt_r/tgt_c offsets). Ties break row-major. Fills
    ``dist`` with BFS distances from the pose as a side effect. Returns the
    flat target index, or -1 if no reachable frontier exists at cost >= 1.
    """
    dist[:] = UNREACHED
    bfs_distances(known, rows, cols, pr, pc, dist, queue)
    best_idx = -1
    best_cost = 0
    best_utility = -1.0
    n = rows * cols
    for idx in range(n):
        d = dist[idx]
        if d < 1 or not _is_frontier(known, rows, cols, idx):
            continue
        if utility_mode == 0:
            if best_idx == -1 or d < best_cost:
                best_idx = idx
                best_cost = d
        else:
            r = idx // cols
            c = idx % cols
            gain = 0
            for k in range(tgt_r.shape[0]):
                tr = r + tgt_r[k]
                tc = c + tgt_c[k]
                if 0 <= tr < rows and 0 <= tc < cols and known[tr * cols + tc] == UNKNOWN:
                    gain += 1
            utility = gain / (1.0 + d)
            if utility > best_utility:
                best_idx = idx
                best_utility = utility
    return best_idx


@njit(cache=True)
def first_action_toward(known, rows, cols, pr, pc, target, dist, queue):
    """First move of the shortest known-free path from (pr, pc) to ``target``.

    BFS runs from the target, then the pose steps onto the first neighbor in
    (N, E, S, W) order that decreases the remaining distance, which realizes
    the lexicographic tie-break of the path contract. Returns the action
    index, or -1 if unreachable or already there.
    """
    dist[:] = UNREACHED
    tr = target // cols
    tc = target % cols
    bfs_distances(known, rows, cols, tr, tc, dist, queue)
    here = dist[pr * cols + pc]
    if here < 1:
        return -1
    want = here - 1
    if pr > 0 and dist[(pr - 1) * cols + pc] == want:
        return 0  # North
    if pc < cols - 1 and dist[pr * cols + pc + 1] == want:
        return 1  # East
    if pr < rows - 1 and dist[(pr + 1) * cols + pc] == want:
        return 2  # South
    if pc > 0 and dist[pr * cols + pc - 1] == want:
        return 3  # West
    return -1


@njit(cache=True)
def reachable_free(obstacles, rows, cols, sr, sc, reach, queue):
    """Flood-fill the 4-connected free component containing (sr, sc) into
    ``reach`` (uint8, zeroed by the caller)."""
    start = sr * cols + sc
    reach[start] = 1
    queue[0] = start
    head = 0
    tail = 1
    while head < tail:
        idx = queue[head]
        head += 1
        r = idx // cols
        c = idx % cols
        if r > 0 and reach[idx - cols] == 0 and obstacles[idx - cols] == 0:
            reach[idx - cols] = 1
            queue[tail] = idx - cols
            tail += 1
        if c < cols - 1 and reach[idx + 1] == 0 and obstacles[idx + 1] == 0:
            reach[idx + 1] = 1
            queue[tail] = idx + 1
            tail += 1
        if r < rows - 1 and reach[idx + cols] == 0 and obstacles[idx + cols] == 0:
            reach[idx + cols] = 1
            queue[tail] = idx + cols
            tail += 1
        if c > 0 and reach[idx - 1] == 0 and obstacles[idx - 1] == 0:
            reach[idx - 1] = 1
            queue[tail] = idx - 1
            tail += 1
