from __future__ import annotations

import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridcyber.wan.generators import (DEFAULT_PROFILE, DegreeProfile, InvalidProfile, NotGraphical,
                                      UnrealizableProfile, benchmark_graphs, chain_components, chung_lu,
                                      connect_by_swaps, havel_hakimi, is_graphical, power_law_weights,
                                      realize_connected, repair_sequence, statistics_graph)


def erdos_gallai(seq) -> bool:
    """Independent graphicality oracle."""
    d = sorted(seq, reverse=True)
    n = len(d)
    if any(x < 0 for x in d) or sum(d) % 2:
        return False
    for k in range(1, n + 1):
        if sum(d[:k]) > k * (k - 1) + sum(min(x, k) for x in d[k:]):
            return False
    return True


def _sequences_exhaustive():
    # every ordered sequence up to length 6, every multiset of length 7 (entries 0..n)
    for n in range(0, 7):
        yield from itertools.product(range(n + 1), repeat=n)
    for combo in itertools.combinations_with_replacement(range(8), 7):
        yield combo[::-1]


def test_erdos_gallai_agrees_with_havel_hakimi_exhaustively():
    mismatches = [s for s in _sequences_exhaustive() if is_graphical(s) != erdos_gallai(s)]
    assert mismatches == []


def test_erdos_gallai_oracle_against_networkx_sample():
    rng = np.random.default_rng(0)
    for _ in range(300):
        seq = rng.integers(0, 9, size=int(rng.integers(1, 10))).tolist()
        assert erdos_gallai(seq) == nx.is_graphical(seq)


def test_havel_hakimi_realizes_random_graphical_sequences():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        n = int(rng.integers(1, 101))
        p = float(rng.uniform(0.01, 0.5))
        ref = nx.gnp_random_graph(n, p, seed=int(rng.integers(1 << 31)))
        seq = [d for _, d in ref.degree()]
        rng.shuffle(seq)
        g = havel_hakimi(seq)
        assert [g.degree(i) for i in range(n)] == seq, trial
        assert nx.number_of_selfloops(g) == 0


@pytest.mark.parametrize("seq", [[1], [3, 1, 1, 1, 1], [4, 4, 1, 1], [2, 2, 2, 2, 1], [-1, 1]])
def test_havel_hakimi_rejects(seq):
    assert not erdos_gallai(seq)
    with pytest.raises(NotGraphical):
        havel_hakimi(seq)


def test_chung_lu_mean_degree_uniform_weights():
    n, target = 50, 4.0
    means = [2 * chung_lu([target] * n, seed=s).number_of_edges() / n for s in range(1000)]
    assert abs(np.mean(means) - target) / target < 0.05


def test_chung_lu_clamps_and_expected_degrees():
    w = [30.0, 30.0, 1.0, 1.0]
    g = chung_lu(w, seed=0)
    assert g.graph["clamped_pairs"] == 1  # 30*30/62 > 1
    assert g.has_edge(0, 1)
    w = power_law_weights(200, 3.0)
    assert w.mean() == pytest.approx(3.0)
    deg = np.mean([[d for _, d in chung_lu(w, seed=s).degree()] for s in range(200)], axis=0)
    # the hub's expected degree is its weight minus the self-pair share
    assert deg[0] == pytest.approx(w[0] * (1 - w[0] / w.sum()), rel=0.1)


def test_degree_profile_validation_and_io(tmp_path):
    with pytest.raises(InvalidProfile):
        DegreeProfile({1: 0.5, 2: 0.4}, 8)
    with pytest.raises(InvalidProfile):
        DegreeProfile({9: 1.0}, 8)
    with pytest.raises(InvalidProfile):
        DegreeProfile({1: 1.2, 2: -0.2}, 8)
    assert DEFAULT_PROFILE.mean == pytest.approx(2.02)
    p = tmp_path / "p.json"
    p.write_text(json.dumps(DEFAULT_PROFILE.to_dict()))
    assert DegreeProfile.load(p) == DEFAULT_PROFILE
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InvalidProfile):
        DegreeProfile.load(tmp_path / "bad.json")
    with pytest.raises(InvalidProfile):
        DegreeProfile.load(tmp_path / "missing.json")


def test_profile_sample_frequencies():
    rng = np.random.default_rng(0)
    draws = np.array(DEFAULT_PROFILE.sample(20000, rng))
    for d, p in DEFAULT_PROFILE.pmf.items():
        assert (draws == d).mean() == pytest.approx(p, abs=0.015)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-2, 12), min_size=1, max_size=40), st.integers(1, 8), st.integers(0, 1000))
def test_repair_sequence_is_graphical_within_bounds(seq, cap, seed):
    out = repair_sequence(seq, cap, np.random.default_rng(seed))
    if out is None:
        return
    hi = min(cap, len(seq) - 1)
    assert len(out) == len(seq)
    assert all(1 <= d <= hi for d in out)
    assert erdos_gallai(out)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 150), st.integers(0, 10_000))
def test_statistics_graph_connected_and_realizes_target(n, seed):
    g = statistics_graph(n, DEFAULT_PROFILE, seed=seed)
    assert g.number_of_nodes() == n and nx.is_connected(g)
    assert nx.number_of_selfloops(g) == 0
    deg = [g.degree(i) for i in range(n)]
    if g.graph["bridges_added"] == 0:
        assert deg == g.graph["target_sequence"]
    assert max(deg) <= max(DEFAULT_PROFILE.max_degree, 2)
    assert all("pos" in g.nodes[i] for i in range(n))


def test_statistics_graph_deterministic():
    a = statistics_graph(80, DEFAULT_PROFILE, seed=5)
    b = statistics_graph(80, DEFAULT_PROFILE, seed=5)
    assert sorted(a.edges()) == sorted(b.edges())
    assert a.graph == b.graph


def test_statistics_graph_rejects_tiny():
    with pytest.raises(UnrealizableProfile):
        statistics_graph(1, DEFAULT_PROFILE, seed=0)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 60), st.integers(0, 10_000))
def test_realize_connected_without_positions(n, seed):
    rng = np.random.default_rng(seed)
    seq = repair_sequence(rng.integers(1, 5, size=n).tolist(), 6, rng)
    if seq is None or sum(seq) < 2 * (n - 1):
        return
    g = realize_connected(seq, rng)
    assert nx.is_connected(g)
    if g.graph["bridges_added"] == 0:
        assert [g.degree(i) for i in range(n)] == seq


def test_connection_helpers():
    g = nx.disjoint_union_all([nx.cycle_graph(4), nx.cycle_graph(5), nx.path_graph(3)])
    before = sorted(d for _, d in g.degree())
    assert connect_by_swaps(g, np.random.default_rng(0)) == 0  # cycles allow degree-preserving swaps
    assert nx.is_connected(g) and sorted(d for _, d in g.degree()) == before
    h = nx.empty_graph(4)
    assert chain_components(h) == 3 and nx.is_connected(h)


def test_benchmark_graphs_shape():
    ref = statistics_graph(100, DEFAULT_PROFILE, seed=1)
    out = benchmark_graphs(ref, seed=1)
    mean = 2 * ref.number_of_edges() / 100
    for name in ("havel_hakimi", "chung_lu"):
        g = out[name]
        assert g.number_of_nodes() == 100 and nx.is_connected(g)
    hh = out["havel_hakimi"]
    assert sum(hh.graph["target_sequence"]) / 100 == pytest.approx(mean, rel=0.1)
