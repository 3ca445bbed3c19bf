"""Range-limited, occlusion-aware grid sensing.

The sensor model: from a pose, every cell within Euclidean distance ``d``
whose connecting segment is not interrupted by an obstacle is visible.
Visibility rays are *supercover* traversals: a ray touches every cell whose
closed unit square the center-to-center segment intersects, so two
diagonally-touching obstacles cannot be seen (or moved) between.
"""

from __future__ import annotations

import functools

import numpy as np

from .grid import Cell, TerrainMap

VisibleSet = set[Cell]


def traverse_ray(a: Cell | tuple[int, int], q: Cell | tuple[int, int]) -> list[Cell]:
    """All cells touched by the closed segment from the center of ``a`` to the
    center of ``q``, ordered from ``a`` to ``q``.

    When the segment passes exactly through a lattice corner, all four
    incident cells are included (conservative occlusion). The returned list
    equals the reverse of ``traverse_ray(q, a)``.
    """
    r0, c0 = a
    r1, c1 = q
    dr = r1 - r0
    dc = c1 - c0
    sr = 1 if dr > 0 else -1
    sc = 1 if dc > 0 else -1
    adr = abs(dr)
    adc = abs(dc)

    cells = [Cell(r0, c0)]
    r, c = r0, c0
    i = 1  # next row-boundary crossing, at t = (2i-1)/(2*adr)
    j = 1  # next col-boundary crossing, at t = (2j-1)/(2*adc)
    while (r, c) != (r1, c1):
        if adc == 0 or (adr > 0 and (2 * i - 1) * adc < (2 * j - 1) * adr):
            r += sr
            i += 1
        elif adr == 0 or (2 * i - 1) * adc > (2 * j - 1) * adr:
            c += sc
            j += 1
        else:
            # Exact corner hit: the two side cells first (row-stepped, then
            # col-stepped -- this order is what makes reversal exact), then
            # the diagonal cell.
            cells.append(Cell(r + sr, c))
            cells.append(Cell(r, c + sc))
            r += sr
            c += sc
            i += 1
            j += 1
        cells.append(Cell(r, c))
    return cells


def line_of_sight(terrain: TerrainMap, a: Cell | tuple[int, int], q: Cell | tuple[int, int]) -> bool:
    """True iff no strictly-intermediate ray cell (endpoints excluded) is an
    obstacle. The target may itself be an obstacle and still be visible."""
    obstacles = terrain.obstacles
    ray = traverse_ray(a, q)
    for cell in ray[1:-1]:
        if obstacles[cell]:
            return False
    return True


@functools.lru_cache(maxsize=32)
def sweep_tables(d: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Precomputed, pose-relative visibility tables for radius ``d``.

    Returns (tgt_r, tgt_c, ray_r, ray_c, ray_start): the (K,) row/col disk
    offsets with ||offset|| <= d in row-major order, the (M,) concatenation of
    each target's strictly-intermediate ray offsets, and the (K+1,) CSR index
    into the ray arrays.
    """
    reach = int(d)
    targets: list[tuple[int, int]] = []
    rays: list[Cell] = []
    starts = [0]
    d2 = d * d
    for dr in range(-reach, reach + 1):
        for dc in range(-reach, reach + 1):
            if dr * dr + dc * dc > d2:
                continue
            targets.append((dr, dc))
            if dr or dc:
                rays.extend(traverse_ray((0, 0), (dr, dc))[1:-1])
            starts.append(len(rays))
    tgt = np.asarray(targets, dtype=np.int64).reshape(-1, 2)
    ray = np.asarray(rays, dtype=np.int64).reshape(-1, 2)
    return (np.ascontiguousarray(tgt[:, 0]), np.ascontiguousarray(tgt[:, 1]),
            np.ascontiguousarray(ray[:, 0]), np.ascontiguousarray(ray[:, 1]),
            np.asarray(starts, dtype=np.int64))


def sensor_sweep(terrain: TerrainMap, pose: Cell | tuple[int, int], d: float) -> VisibleSet:
    """Every cell within Euclidean distance ``d`` of ``pose`` with an
    unobstructed line of sight. Always contains ``pose`` itself."""
    from ._kernels import sweep_visible

    if d < 0:
        raise ValueError(f"sensor radius must be >= 0, got {d}")
    rows, cols = terrain.shape
    pr, pc = pose
    tgt_r, tgt_c, ray_r, ray_c, starts = sweep_tables(float(d))
    flags = np.zeros(rows * cols, dtype=np.uint8)
    obstacles = np.ascontiguousarray(terrain.obstacles.reshape(-1), dtype=np.uint8)
    sweep_visible(obstacles, flags, rows, cols, pr, pc, tgt_r, tgt_c, ray_r, ray_c, starts)
    visible = np.flatnonzero(flags)
    return {Cell(int(idx) // cols, int(idx) % cols) for idx in visible}
