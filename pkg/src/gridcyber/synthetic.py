"""Synthetic grid cases for tests and demos.

Real synthetic grid exports are not shipped with the package.  These
generators produce substation and branch tables of the same shape and size:
substations scattered around a handful of load centres inside a bounding box,
branches to nearest neighbours, and a share of generating substations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .ingest import BranchRecord, GridCase, SubstationRecord, write_branches, write_substations


@dataclass(frozen=True)
class CasePreset:
    name: str
    substations: int
    utilities: int
    bas: int
    bbox: tuple[float, float, float, float]  # lat_min, lat_max, lon_min, lon_max
    region: str


PRESETS = {
    "sc": CasePreset("sc", 208, 4, 1, (32.1, 35.2, -83.3, -78.6), "SouthCarolina"),
    "texas": CasePreset("texas", 1250, 20, 1, (25.9, 36.4, -106.5, -93.6), "Texas"),
    "wecc": CasePreset("wecc", 4762, 80, 20, (31.3, 49.0, -124.6, -103.0), "West"),
}


def synthetic_case(n_subs: int, seed: int = 0, name: str = "synthetic",
                   bbox: tuple[float, float, float, float] = (32.1, 35.2, -83.3, -78.6),
                   region: str = "Region", gen_fraction: float = 0.3,
                   neighbours: int = 2) -> GridCase:
    rng = np.random.default_rng(seed)
    lat0, lat1, lon0, lon1 = bbox
    n_centres = max(1, n_subs // 40)
    centres = np.column_stack([rng.uniform(lat0, lat1, n_centres), rng.uniform(lon0, lon1, n_centres)])
    spread = 0.08 * np.array([lat1 - lat0, lon1 - lon0])
    pick = rng.integers(n_centres, size=n_subs)
    pts = centres[pick] + rng.normal(size=(n_subs, 2)) * spread
    pts[:, 0] = np.clip(pts[:, 0], lat0, lat1)
    pts[:, 1] = np.clip(pts[:, 1], lon0, lon1)
    pts = np.round(pts, 4)

    buses = rng.choice([1, 2, 3, 4], size=n_subs, p=[0.3, 0.45, 0.2, 0.05])
    is_gen = rng.random(n_subs) < gen_fraction
    kv = rng.choice([115.0, 138.0, 230.0, 345.0, 500.0], size=n_subs, p=[0.2, 0.4, 0.2, 0.15, 0.05])
    zones = [f"Zone{z}" for z in range(1, 6)]
    subs = []
    for i in range(n_subs):
        gen = round(float(rng.uniform(20, 900)), 2) if is_gen[i] else None
        load = None if is_gen[i] else round(float(rng.uniform(1, 150)), 2)
        subs.append(SubstationRecord(
            longitude=float(pts[i, 1]), latitude=float(pts[i, 0]), sub_id=i + 1,
            sub_name=f"SUB {i + 1}", area_name=region, zone=zones[int(pick[i]) % len(zones)],
            bus_count=int(buses[i]), nominal_kv=float(kv[i]),
            gen_mw=gen, gen_mvar=None if gen is None else round(gen * 0.16, 2),
            load_mw=load, load_mvar=None if load is None else round(load * 0.27, 2)))

    branches = [BranchRecord(i + 1, i + 1) for i in range(0, n_subs, 7)]
    k = min(neighbours + 1, n_subs)
    if n_subs > 1:
        _, idx = cKDTree(pts).query(pts, k=k)
        for i in range(n_subs):
            for j in np.atleast_1d(idx[i])[1:]:
                branches.append(BranchRecord(i + 1, int(j) + 1))
    return GridCase(name, subs, branches)


def preset_case(name: str, seed: int = 0) -> GridCase:
    p = PRESETS[name]
    return synthetic_case(p.substations, seed=seed, name=p.name, bbox=p.bbox, region=p.region)


def write_case(case: GridCase, directory: str | os.PathLike) -> tuple[Path, Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    return (write_substations(case.substations, d / f"{case.case_name}_substations.csv"),
            write_branches(case.branches, d / f"{case.case_name}_branches.csv"))


def radial_tree_case(n_trans: int = 12, gens_per_trans: int = 2, seed: int = 0) -> GridCase:
    """Case in which every generation substation touches exactly one transmission substation.

    Transmission substations form a chain; each carries ``gens_per_trans``
    generation substations placed close to it.
    """
    rng = np.random.default_rng(seed)
    subs: list[SubstationRecord] = []
    branches: list[BranchRecord] = []
    sid = 0
    for t in range(n_trans):
        sid += 1
        tid = sid
        lat, lon = 33.0 + 0.05 * t, -81.0 + 0.1 * (t % 4)
        subs.append(SubstationRecord(lon, lat, tid, f"T{t}", "Region", "Z", 2, 138.0, None, None, 10.0, 2.0))
        if t:
            branches.append(BranchRecord(tid - 1 - gens_per_trans, tid))
        for _ in range(gens_per_trans):
            sid += 1
            off = rng.normal(scale=0.01, size=2)
            subs.append(SubstationRecord(round(lon + off[1], 5), round(lat + off[0], 5), sid,
                                         f"G{sid}", "Region", "Z", 1, 345.0, 100.0, 10.0, None, None))
            branches.append(BranchRecord(sid, tid))
    return GridCase("radial_tree", subs, branches)
