"""Siting utility control centers and balancing authorities.

Substations are grouped into utilities by k-means over raw ``(lat, lon)``
degrees; each utility control center (UCC) sits at its cluster centroid.
Balancing authorities (BAs) are then placed by clustering the UCC locations a
second time.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import GenerationError
from .ingest import GridCase

MAX_ITER = 300


class KTooLarge(GenerationError):
    pass


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    member_sub_ids: tuple[int, ...]
    centroid: tuple[float, float]


def _farthest_point_seeds(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    first = int(rng.integers(n))
    chosen = [first]
    dmin = ((x - x[first]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dmin))  # first maximum wins ties
        chosen.append(nxt)
        dmin = np.minimum(dmin, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d, axis=1)  # lowest cluster id on ties
    return labels, d


def kmeans_labels(points: Sequence[tuple[float, float]] | np.ndarray, k: int,
                  seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm with farthest-point seeding.

    Returns ``(labels, centroids)``.  Empty clusters are refilled with the point
    currently farthest from its own centroid.
    """
    x = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(x)
    if k < 1:
        raise KTooLarge(f"k must be at least 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of points ({n})")
    centers = _farthest_point_seeds(x, k, np.random.default_rng(seed))
    labels, d = _assign(x, centers)
    for _ in range(MAX_ITER):
        labels = _repair_empty(labels, d, k)
        centers = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
        new_labels, d = _assign(x, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, centers


def _repair_empty(labels: np.ndarray, d: np.ndarray, k: int) -> np.ndarray:
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        own = d[np.arange(len(labels)), labels]
        movable = counts[labels] > 1
        if not movable.any():
            break
        own = np.where(movable, own, -1.0)
        p = int(np.argmax(own))
        counts[labels[p]] -= 1
        labels[p] = c
        counts[c] += 1
        d[p, :] = np.inf
        d[p, c] = 0.0
    return labels


def kmeans(points: Sequence[tuple[float, float]], k: int, seed: int,
           ids: Sequence[int] | None = None) -> list[Cluster]:
    """Cluster ``(lat, lon)`` points; members are reported by ``ids`` (default: indices)."""
    labels, centers = kmeans_labels(points, k, seed)
    ids = list(range(len(labels))) if ids is None else list(ids)
    return [
        Cluster(c, tuple(ids[i] for i in np.flatnonzero(labels == c)),
                (float(centers[c, 0]), float(centers[c, 1])))
        for c in range(k)
    ]


@dataclass(frozen=True)
class SitePlan:
    """Where the control sites are and who belongs to whom.

    Utility and BA numbers used in labels are 1-based; list positions are
    0-based.  ``utility_ba[u]`` is the index of the BA owning utility ``u``.
    """

    utilities: tuple[Cluster, ...]
    utility_of: dict[int, int]
    sub_labels: dict[int, str]
    utility_labels: tuple[str, ...]
    utility_regions: tuple[str, ...]
    ba_sites: tuple[tuple[float, float], ...] = ()
    utility_ba: tuple[int, ...] = ()
    ba_labels: tuple[str, ...] = ()
    seeds: dict[str, int] = field(default_factory=dict)

    @property
    def n_utilities(self) -> int:
        return len(self.utilities)

    @property
    def n_bas(self) -> int:
        return len(self.ba_sites)

    @property
    def labels(self) -> dict[str, str]:
        out = {f"sub/{sid}": lab for sid, lab in self.sub_labels.items()}
        out.update({f"utility/{u + 1}": lab for u, lab in enumerate(self.utility_labels)})
        out.update({f"ba/{b + 1}": lab for b, lab in enumerate(self.ba_labels)})
        return out

    def utilities_of_ba(self, ba: int) -> list[int]:
        return [u for u, b in enumerate(self.utility_ba) if b == ba]


def _majority(values: list[str]) -> str:
    counts = Counter(values)
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best)


def _label_substations(case: GridCase, utility_of: dict[int, int]) -> dict[int, str]:
    labels: dict[int, str] = {}
    taken: set[str] = set()
    for s in case.substations:
        label = f"{s.area_name}.Utility{utility_of[s.sub_id] + 1}.{s.sub_name}"
        if label in taken:
            label = f"{label}#{s.sub_id}"
        taken.add(label)
        labels[s.sub_id] = label
    return labels


def place_uccs(case: GridCase, n_utilities: int, seed: int) -> SitePlan:
    """Cluster substations into ``n_utilities`` utilities and label them.

    Labels follow ``Region.Utility<n>.SubstationName`` where the region is the
    substation's area name; a ``#<sub_id>`` suffix disambiguates repeated names.
    """
    if n_utilities < 1:
        raise KTooLarge(f"n_utilities must be at least 1, got {n_utilities}")
    subs = case.substations
    clusters = kmeans([s.coord for s in subs], n_utilities, seed, ids=[s.sub_id for s in subs])
    by_id = case.by_id()
    utility_of = {sid: c.cluster_id for c in clusters for sid in c.member_sub_ids}
    regions = tuple(_majority([by_id[sid].area_name for sid in c.member_sub_ids]) for c in clusters)
    utility_labels = tuple(f"{regions[c.cluster_id]}.Utility{c.cluster_id + 1}" for c in clusters)

    sub_labels = _label_substations(case, utility_of)
    return SitePlan(utilities=tuple(clusters), utility_of=utility_of, sub_labels=sub_labels,
                    utility_labels=utility_labels, utility_regions=regions,
                    seeds={"utilities": seed})


def place_bas(plan: SitePlan, n_bas: int, seed: int) -> SitePlan:
    if n_bas < 1:
        raise KTooLarge(f"n_bas must be at least 1, got {n_bas}")
    if n_bas > plan.n_utilities:
        raise KTooLarge(f"n_bas={n_bas} exceeds the number of utilities ({plan.n_utilities})")
    clusters = kmeans([u.centroid for u in plan.utilities], n_bas, seed)
    utility_ba = [0] * plan.n_utilities
    for c in clusters:
        for u in c.member_sub_ids:
            utility_ba[u] = c.cluster_id
    return replace(plan,
                   ba_sites=tuple(c.centroid for c in clusters),
                   utility_ba=tuple(utility_ba),
                   ba_labels=tuple(f"BA{c.cluster_id + 1}" for c in clusters),
                   seeds={**plan.seeds, "bas": seed})


def plan_sites(case: GridCase, n_utilities: int, n_bas: int, seed: int) -> SitePlan:
    return place_bas(place_uccs(case, n_utilities, seed), n_bas, seed)


def planted_plan(case: GridCase, assignment: dict[int, int], utility_ba: Sequence[int] | None = None) -> SitePlan:
    """Build a plan from a fixed substation → utility assignment (0-based).

    Used for reproducing a known clustering; centroids are member means and
    each BA sits at the mean of its UCCs.
    """
    by_id = case.by_id()
    n_u = max(assignment.values()) + 1
    members: list[list[int]] = [[] for _ in range(n_u)]
    for s in case.substations:
        members[assignment[s.sub_id]].append(s.sub_id)
    clusters = tuple(
        Cluster(u, tuple(m), tuple(float(v) for v in np.mean([by_id[i].coord for i in m], axis=0)))
        for u, m in enumerate(members)
    )
    regions = tuple(_majority([by_id[i].area_name for i in c.member_sub_ids]) for c in clusters)
    sub_labels = _label_substations(case, assignment)
    utility_ba = tuple(utility_ba) if utility_ba is not None else (0,) * n_u
    n_b = max(utility_ba) + 1
    ba_sites = tuple(
        tuple(float(v) for v in np.mean([clusters[u].centroid for u in range(n_u) if utility_ba[u] == b], axis=0))
        for b in range(n_b)
    )
    return SitePlan(clusters, dict(assignment), sub_labels,
                    tuple(f"{regions[u]}.Utility{u + 1}" for u in range(n_u)), regions,
                    ba_sites, utility_ba, tuple(f"BA{b + 1}" for b in range(n_b)))
