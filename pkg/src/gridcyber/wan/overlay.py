"""Rotating an abstract graph layout onto substation geography."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

OPTIMAL_LIMIT = 500


@dataclass(frozen=True)
class Alignment:
    angle_deg: float
    cost: float
    mapping: dict[int, int]  # cyber index -> power index
    rms_radius: float


def _centered(points: np.ndarray) -> np.ndarray:
    return points - points.mean(axis=0)


def _rms(points: np.ndarray) -> float:
    return float(np.sqrt((points ** 2).sum(axis=1).mean()))


def greedy_matching(dist: np.ndarray) -> dict[int, int]:
    """One-to-one matching taking pairs in ascending distance order.

    Implemented as repeated mutual-nearest-neighbour rounds, which select the
    same pairs as scanning the sorted pair list when distances are distinct
    (ties resolve toward lower indices).
    """
    rows = np.arange(dist.shape[0])
    cols = np.arange(dist.shape[1])
    match: dict[int, int] = {}
    target = min(len(rows), len(cols))
    while len(match) < target:
        sub = dist[np.ix_(rows, cols)]
        best_col = np.argmin(sub, axis=1)
        best_row = np.argmin(sub, axis=0)
        mutual = np.flatnonzero(best_row[best_col] == np.arange(len(rows)))
        for r in mutual:
            match[int(rows[r])] = int(cols[best_col[r]])
        keep_r = np.ones(len(rows), dtype=bool)
        keep_r[mutual] = False
        keep_c = np.ones(len(cols), dtype=bool)
        keep_c[best_col[mutual]] = False
        rows, cols = rows[keep_r], cols[keep_c]
    return match


def _match(dist: np.ndarray, optimal: bool) -> tuple[dict[int, int], float]:
    if optimal:
        r, c = linear_sum_assignment(dist)
        mapping = {int(i): int(j) for i, j in zip(r, c)}
    else:
        mapping = greedy_matching(dist)
    cost = float(sum(dist[i, j] for i, j in mapping.items()))
    return mapping, cost


def align_overlay(cyber_points: Sequence[tuple[float, float]],
                  power_points: Sequence[tuple[float, float]],
                  step_deg: float = 1.0, optimal: bool = False) -> Alignment:
    """Find the rotation of ``cyber_points`` that best overlays ``power_points``.

    ``cyber_points`` are planar ``(x, y)``; ``power_points`` are ``(lat, lon)``
    and are treated as the plane ``(x, y) = (lon, lat)``.  Both sets are
    centred, the cyber set is scaled to the power set's RMS radius, and every
    angle on a ``step_deg`` grid over [0, 360) is tried.  The matching at each
    angle is greedy nearest-neighbour unless ``optimal`` (Hungarian, at most
    500 points).  The angle is the counter-clockwise rotation applied to the
    cyber set.  Returns the lowest total matched distance; on ties the
    smaller angle wins.
    """
    cyber = np.asarray(cyber_points, dtype=np.float64).reshape(-1, 2)
    power = np.asarray(power_points, dtype=np.float64).reshape(-1, 2)[:, ::-1]
    if len(cyber) > len(power) + 1:
        raise ValueError(f"{len(cyber)} cyber points cannot overlay {len(power)} power points")
    if optimal and max(len(cyber), len(power)) > OPTIMAL_LIMIT:
        raise ValueError(f"optimal matching is limited to {OPTIMAL_LIMIT} points")
    cyber = _centered(cyber)
    power = _centered(power)
    radius = _rms(power)
    cr = _rms(cyber)
    if cr > 0:
        cyber = cyber * (radius / cr)

    best: Alignment | None = None
    n_steps = int(round(360.0 / step_deg))
    for k in range(n_steps):
        theta = np.deg2rad(k * step_deg)
        c, s = np.cos(theta), np.sin(theta)
        rotated = cyber @ np.array([[c, s], [-s, c]])
        dist = np.sqrt(((rotated[:, None, :] - power[None, :, :]) ** 2).sum(axis=2))
        mapping, cost = _match(dist, optimal)
        if best is None or cost < best.cost - 1e-12:
            best = Alignment(k * step_deg, cost, mapping, radius)
    assert best is not None
    return best
