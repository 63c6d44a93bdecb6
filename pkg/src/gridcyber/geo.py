"""Great-circle distances and the on-disk substation distance cache."""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0088
CACHE_ENV = "GRIDCYBER_CACHE_DIR"


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km between two ``(lat, lon)`` points in degrees."""
    lat1, lon1 = np.radians(a[0]), np.radians(a[1])
    lat2, lon2 = np.radians(b[0]), np.radians(b[1])
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return float(2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(min(1.0, h))))


def pairwise_km(coords: np.ndarray) -> np.ndarray:
    """Condensed (scipy ``pdist`` order) great-circle distance vector, float32."""
    coords = np.radians(np.asarray(coords, dtype=np.float64))
    n = len(coords)
    out = np.empty(n * (n - 1) // 2, dtype=np.float32)
    pos = 0
    lat, lon = coords[:, 0], coords[:, 1]
    coslat = np.cos(lat)
    for i in range(n - 1):
        dlat = lat[i + 1:] - lat[i]
        dlon = lon[i + 1:] - lon[i]
        h = np.sin(dlat / 2) ** 2 + coslat[i] * coslat[i + 1:] * np.sin(dlon / 2) ** 2
        d = 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.minimum(1.0, h)))
        out[pos:pos + len(d)] = d
        pos += len(d)
    return out


class SubstationDistances:
    """Pairwise great-circle distances between the substations of one case.

    The matrix is stored condensed in float32.  When ``cache_dir`` is given the
    vector is persisted as ``<key>.npy`` and reused on later runs with the same
    key (normally a hash of the input files).
    """

    def __init__(self, sub_ids: Sequence[int], coords: Sequence[tuple[float, float]],
                 cache_dir: str | os.PathLike | None = None, key: str | None = None):
        self._index = {sid: i for i, sid in enumerate(sub_ids)}
        self._n = len(self._index)
        self.from_cache = False
        path = None
        if cache_dir is not None and key is not None:
            path = Path(cache_dir) / f"distances-{key}.npy"
            if path.exists():
                vec = np.load(path)
                if len(vec) == self._n * (self._n - 1) // 2:
                    self._vec = vec
                    self.from_cache = True
                    return
        self._vec = pairwise_km(np.asarray(coords, dtype=np.float64).reshape(-1, 2))
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp.npy")
            np.save(tmp, self._vec)
            os.replace(tmp, path)

    def between(self, a: int, b: int) -> float:
        i, j = self._index[a], self._index[b]
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        n = self._n
        return float(self._vec[n * i - i * (i + 1) // 2 + (j - i - 1)])


def file_digest(*paths: str | os.PathLike) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
        h.update(b"\0")
    return h.hexdigest()[:24]
