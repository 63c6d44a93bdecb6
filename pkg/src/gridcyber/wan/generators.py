"""Degree-sequence graph generators.

Havel-Hakimi realizes a degree sequence exactly; Chung-Lu matches it in
expectation.  The statistics-based generator samples a sequence from a
:class:`DegreeProfile`, repairs it until graphical, and realizes it as a
connected simple graph.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import networkx as nx
import numpy as np

from ..errors import GenerationError


class NotGraphical(GenerationError):
    pass


class UnrealizableProfile(GenerationError):
    pass


class InvalidProfile(GenerationError):
    pass


def havel_hakimi(degree_sequence: Sequence[int]) -> nx.Graph:
    """Realize ``degree_sequence`` exactly as a simple graph on nodes ``0..n-1``.

    At each step the node with the largest residual degree (lowest id on ties)
    is joined to the next-largest residual nodes.  Raises :class:`NotGraphical`
    when no simple graph exists.
    """
    seq = [int(d) for d in degree_sequence]
    n = len(seq)
    if any(d < 0 for d in seq):
        raise NotGraphical("degrees must be nonnegative")
    if sum(seq) % 2:
        raise NotGraphical("degree sum is odd")
    g = nx.Graph()
    g.add_nodes_from(range(n))
    residual = list(seq)
    alive = list(range(n))
    while alive:
        alive.sort(key=lambda v: (-residual[v], v))
        v = alive[0]
        d = residual[v]
        if d == 0:
            break
        targets = alive[1:d + 1]
        if len(targets) < d or residual[targets[-1]] == 0:
            raise NotGraphical(f"sequence is not graphical: {sorted(seq, reverse=True)}")
        for u in targets:
            g.add_edge(v, u)
            residual[u] -= 1
        residual[v] = 0
        alive = alive[1:]
    return g


def is_graphical(degree_sequence: Sequence[int]) -> bool:
    try:
        havel_hakimi(degree_sequence)
    except NotGraphical:
        return False
    return True


def chung_lu(weights: Sequence[float], seed: int) -> nx.Graph:
    """Chung-Lu random graph with expected degrees ``weights``.

    Pair ``(i, j)`` is linked with probability ``min(1, w_i w_j / sum(w))``.
    The number of clamped pairs is stored in ``graph.graph['clamped_pairs']``.
    """
    w = np.asarray(weights, dtype=np.float64)
    n = len(w)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    total = w.sum()
    if n < 2 or total <= 0:
        g.graph["clamped_pairs"] = 0
        return g
    iu, ju = np.triu_indices(n, k=1)
    p = w[iu] * w[ju] / total
    clamped = int((p > 1).sum())
    p = np.minimum(p, 1.0)
    draws = np.random.default_rng(seed).random(len(p))
    hit = draws < p
    g.add_edges_from(zip(iu[hit].tolist(), ju[hit].tolist()))
    g.graph["clamped_pairs"] = clamped
    return g


@dataclass(frozen=True)
class DegreeProfile:
    """Degree probability mass function with a hard cap on realized degree."""

    pmf: Mapping[int, float]
    max_degree: int

    def __post_init__(self):
        if self.max_degree < 1:
            raise InvalidProfile("max_degree must be at least 1")
        if not self.pmf:
            raise InvalidProfile("empty degree distribution")
        for d, p in self.pmf.items():
            if not (1 <= d <= self.max_degree):
                raise InvalidProfile(f"degree {d} outside [1, {self.max_degree}]")
            if p < 0:
                raise InvalidProfile(f"negative probability for degree {d}")
        if abs(sum(self.pmf.values()) - 1.0) > 1e-9:
            raise InvalidProfile(f"probabilities sum to {sum(self.pmf.values())}, not 1")

    @property
    def mean(self) -> float:
        return float(sum(d * p for d, p in self.pmf.items()))

    def sample(self, n: int, rng: np.random.Generator) -> list[int]:
        degrees = sorted(self.pmf)
        probs = np.array([self.pmf[d] for d in degrees])
        return [int(x) for x in rng.choice(degrees, size=n, p=probs / probs.sum())]

    def to_dict(self) -> dict:
        return {"pmf": {str(d): p for d, p in sorted(self.pmf.items())},
                "max_degree": self.max_degree}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DegreeProfile":
        try:
            pmf = {int(k): float(v) for k, v in data["pmf"].items()}
            return cls(pmf, int(data["max_degree"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidProfile(f"malformed degree profile: {exc}") from None

    @classmethod
    def load(cls, path: str | os.PathLike) -> "DegreeProfile":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidProfile(f"cannot read degree profile {path}: {exc}") from None
        return cls.from_dict(data)


DEFAULT_PROFILE = DegreeProfile({1: 0.40, 2: 0.30, 3: 0.20, 4: 0.08, 5: 0.02}, max_degree=8)


def repair_sequence(seq: Sequence[int], cap: int, rng: np.random.Generator) -> list[int] | None:
    """Clamp, fix parity and shave the largest entries until graphical.

    Entries stay in ``[1, min(cap, n-1)]``.  Returns ``None`` when no such
    repair exists (for instance an odd number of nodes with ``cap == 1``).
    """
    n = len(seq)
    hi = min(cap, n - 1)
    if hi < 1:
        return None
    out = [min(max(int(d), 1), hi) for d in seq]

    def fix_parity() -> bool:
        if sum(out) % 2 == 0:
            return True
        up = [i for i, d in enumerate(out) if d < hi]
        if up:
            out[up[int(rng.integers(len(up)))]] += 1
            return True
        down = [i for i, d in enumerate(out) if d > 1]
        if down:
            out[down[int(rng.integers(len(down)))]] -= 1
            return True
        return False

    if not fix_parity():
        return None
    for _ in range(n * hi + 1):
        if is_graphical(out):
            return out
        top = max(range(n), key=lambda i: (out[i], -i))
        if out[top] == 1:
            return None
        out[top] -= 1
        if not fix_parity():
            return None
    return out if is_graphical(out) else None


def _non_bridge_edges(g: nx.Graph, nodes: set[int]) -> list[tuple[int, int]]:
    sub = g.subgraph(nodes)
    bridges = {frozenset(e) for e in nx.bridges(sub)}
    return sorted((min(u, v), max(u, v)) for u, v in sub.edges() if frozenset((u, v)) not in bridges)


def connect_by_swaps(g: nx.Graph, rng: np.random.Generator) -> int:
    """Join components in place, preserving degrees where possible.

    Two components merge by a double-edge swap when at least one of them has a
    cycle edge; otherwise a bridge is added between their lowest-degree nodes.
    Returns the number of added bridges (each adds one to two degrees).
    """
    added = 0
    while True:
        comps = sorted((set(c) for c in nx.connected_components(g)), key=lambda c: (-len(c), min(c)))
        if len(comps) <= 1:
            return added
        main, other = comps[0], comps[1]
        cyc_main = _non_bridge_edges(g, main)
        cyc_other = _non_bridge_edges(g, other)
        other_edges = sorted((min(u, v), max(u, v)) for u, v in g.subgraph(other).edges())
        main_edges = sorted((min(u, v), max(u, v)) for u, v in g.subgraph(main).edges())
        if cyc_main and other_edges:
            a, b = cyc_main[int(rng.integers(len(cyc_main)))]
            c, d = other_edges[int(rng.integers(len(other_edges)))]
        elif cyc_other and main_edges:
            a, b = main_edges[int(rng.integers(len(main_edges)))]
            c, d = cyc_other[int(rng.integers(len(cyc_other)))]
        else:
            u = min(main, key=lambda v: (g.degree(v), v))
            v = min(other, key=lambda x: (g.degree(x), x))
            g.add_edge(u, v)
            added += 1
            continue
        g.remove_edge(a, b)
        g.remove_edge(c, d)
        g.add_edge(a, c)
        g.add_edge(b, d)


def chain_components(g: nx.Graph) -> int:
    """Join components in place by bridging consecutive components.

    Components are ordered by their smallest node id and the lowest-degree
    node of each is linked to the lowest-degree node of the next.
    """
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
    for prev, nxt in zip(comps, comps[1:]):
        u = min(prev, key=lambda v: (g.degree(v), v))
        v = min(nxt, key=lambda x: (g.degree(x), x))
        g.add_edge(u, v)
    return max(0, len(comps) - 1)


def raise_for_connectivity(seq: list[int], cap: int, rng: np.random.Generator) -> int:
    """Raise entries in place until ``sum >= 2(n-1)``; returns the added degree.

    A connected graph on ``n`` nodes needs at least ``n-1`` edges, so sparser
    draws are topped up on randomly chosen nodes below the cap.
    """
    n = len(seq)
    hi = min(cap, n - 1)
    added = 0
    while sum(seq) < 2 * (n - 1) or sum(seq) % 2:
        room = [i for i, d in enumerate(seq) if d < hi]
        if not room:
            break
        seq[room[int(rng.integers(len(room)))]] += 1
        added += 1
    return added


def _prufer_tree(seq: Sequence[int], rng: np.random.Generator) -> nx.Graph:
    n = len(seq)
    if n == 2:
        return nx.Graph([(0, 1)])
    code = [i for i, d in enumerate(seq) for _ in range(d - 1)]
    rng.shuffle(code)
    return nx.from_prufer_sequence(code[:n - 2])


def _geometric_tree(seq: Sequence[int], pos: np.ndarray, rng: np.random.Generator) -> nx.Graph:
    """Degree-constrained nearest-neighbour spanning tree grown from a random root.

    While only one free stub remains on the tree, leaves are not attached so
    the growth cannot stall.
    """
    n = len(seq)
    deg = np.asarray(seq)
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    cap = deg.astype(np.int64).copy()
    intree = np.zeros(n, dtype=bool)
    intree[int(rng.integers(n))] = True
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for _ in range(n - 1):
        tree = np.flatnonzero(intree & (cap > 0))
        if len(tree) == 0:
            raise UnrealizableProfile("spanning tree ran out of free stubs")
        out = np.flatnonzero(~intree)
        if cap[tree].sum() == 1:
            branching = out[deg[out] >= 2]
            if len(branching):
                out = branching
        k = int(np.argmin(d2[np.ix_(tree, out)]))
        u, v = int(tree[k // len(out)]), int(out[k % len(out)])
        g.add_edge(u, v)
        cap[u] -= 1
        cap[v] -= 1
        intree[v] = True
    return g


def _place_leftover_stubs(g: nx.Graph, residual: list[int], rng: np.random.Generator,
                          pos: np.ndarray | None = None) -> None:
    """Spend residual stubs as extra edges without breaking connectivity or simplicity.

    With positions the nearest eligible partner is chosen, otherwise a random one.
    """
    while sum(residual):
        u = max(range(len(residual)), key=lambda v: (residual[v], -v))
        nbrs = set(g[u]) | {u}
        partners = [v for v, r in enumerate(residual) if r > 0 and v not in nbrs]
        if partners:
            if pos is None:
                v = partners[int(rng.integers(len(partners)))]
            else:
                v = min(partners, key=lambda w: (float(((pos[w] - pos[u]) ** 2).sum()), w))
            g.add_edge(u, v)
            residual[u] -= 1
            residual[v] -= 1
            continue
        edges = sorted((min(x, y), max(x, y)) for x, y in g.edges())
        if residual[u] >= 2:
            # (x, y) -> (u, x), (u, y): u bridges the two sides
            opts = [(x, y) for x, y in edges if x not in nbrs and y not in nbrs]
            if not opts:
                raise UnrealizableProfile("no edge available to absorb leftover stubs")
            x, y = opts[int(rng.integers(len(opts)))]
            g.remove_edge(x, y)
            g.add_edges_from([(u, x), (u, y)])
            residual[u] -= 2
            continue
        v = next(v for v, r in enumerate(residual) if r > 0 and v != u)
        vn = set(g[v]) | {v}
        # (x, y) -> (u, x), (v, y); u-v already adjacent so the graph stays connected
        opts = [(a, b) for x, y in edges for a, b in ((x, y), (y, x))
                if a not in nbrs and b not in vn and a != b]
        if not opts:
            raise UnrealizableProfile("no edge available to absorb leftover stubs")
        x, y = opts[int(rng.integers(len(opts)))]
        g.remove_edge(x, y)
        g.add_edges_from([(u, x), (v, y)])
        residual[u] -= 1
        residual[v] -= 1


def realize_connected(seq: Sequence[int], rng: np.random.Generator,
                      pos: np.ndarray | None = None) -> nx.Graph:
    """Connected simple graph with exactly the degrees in ``seq``.

    Requires every entry ``>= 1`` and ``sum(seq) >= 2(n-1)``.  A spanning tree
    is grown first (nearest-neighbour when ``pos`` is given, otherwise from a
    random Prufer code over the degree excess) and the remaining stubs become
    chords.  If that fails the sequence is realized with Havel-Hakimi and
    joined by :func:`connect_by_swaps`, which may add bridges.
    """
    seq = [int(d) for d in seq]
    try:
        g = _prufer_tree(seq, rng) if pos is None else _geometric_tree(seq, pos, rng)
        residual = [d - g.degree(i) for i, d in enumerate(seq)]
        _place_leftover_stubs(g, residual, rng, pos)
        g.graph["bridges_added"] = 0
    except UnrealizableProfile:
        g = havel_hakimi(seq)
        g.graph["bridges_added"] = connect_by_swaps(g, rng)
    return g


def statistics_graph(n: int, profile: DegreeProfile, seed: int | np.random.Generator,
                     retries: int = 20) -> nx.Graph:
    """Connected simple graph on ``n`` nodes whose degrees follow ``profile``.

    Nodes get uniform random positions in the unit square (node attribute
    ``pos``) and links favour near neighbours, giving the long, mesh-like paths
    of a geographic utility network rather than a random graph's short ones.
    ``graph.graph`` records the repaired target sequence and how much degree
    was added to make a connected realization possible.
    """
    if n < 2:
        raise UnrealizableProfile("a statistics-based graph needs at least 2 nodes")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(retries):
        seq = repair_sequence(profile.sample(n, rng), profile.max_degree, rng)
        if seq is None:
            continue
        added = raise_for_connectivity(seq, profile.max_degree, rng)
        if sum(seq) >= 2 * (n - 1) and sum(seq) % 2 == 0 and is_graphical(seq):
            break
    else:
        raise UnrealizableProfile(f"could not repair a connectable graphical sequence for "
                                  f"n={n} after {retries} draws")
    pos = rng.random((n, 2))
    g = realize_connected(seq, rng, pos)
    for i in range(n):
        g.nodes[i]["pos"] = (float(pos[i, 0]), float(pos[i, 1]))
    g.graph["target_sequence"] = seq
    g.graph["degree_added"] = added
    return g


def power_law_weights(n: int, mean_degree: float, exponent: float = 2.5) -> np.ndarray:
    """Chung-Lu expected-degree sequence ``w_i ~ (i+1)^(-1/(exponent-1))`` scaled to ``mean_degree``."""
    w = (np.arange(n) + 1.0) ** (-1.0 / (exponent - 1.0))
    return w * (mean_degree * n / w.sum())


def benchmark_graphs(reference: nx.Graph, seed: int, exponent: float = 2.5) -> dict[str, nx.Graph]:
    """Havel-Hakimi and Chung-Lu comparison graphs for a statistics-based graph.

    Both targets share the reference's node count and mean degree but follow a
    power-law shape.  Each result is made connected by chaining components.
    """
    n = reference.number_of_nodes()
    mean = 2.0 * reference.number_of_edges() / n
    w = power_law_weights(n, mean, exponent)
    rng = np.random.default_rng(seed)
    seq = repair_sequence([max(1, int(round(x))) for x in w], n - 1, rng)
    if seq is None:
        raise NotGraphical(f"power-law target for n={n} could not be made graphical")
    hh = havel_hakimi(seq)
    hh.graph["target_sequence"] = seq
    hh.graph["bridges_added"] = chain_components(hh)
    cl = chung_lu(w, seed)
    cl.graph["bridges_added"] = chain_components(cl)
    return {"havel_hakimi": hh, "chung_lu": cl}
