# # Degree-statistics graphs against Havel-Hakimi and Chung-Lu
#
# The statistics generator draws degrees from a bounded profile, realizes a
# connected graph and lays it out geometrically.  The two benchmarks get a
# heavy-tailed target with the same mean degree.  Medians over ten seeds.

# %%
import networkx as nx

from gridcyber.pipeline import comparison_table, run_compare
from gridcyber.wan import DEFAULT_PROFILE, benchmark_graphs, statistics_graph

print("profile:", DEFAULT_PROFILE.pmf, "mean", round(DEFAULT_PROFILE.mean, 3))
print(comparison_table(run_compare(nodes=(50, 500), seeds=10)))

# %% [markdown]
# One 200-node sample: the statistics graph never exceeds the profile's
# maximum degree, while the benchmarks grow hubs.

# %%
ref = statistics_graph(200, DEFAULT_PROFILE, seed=3)
graphs = {"statistics": ref, **benchmark_graphs(ref, seed=3)}
for name, g in graphs.items():
    degrees = sorted((d for _, d in g.degree()), reverse=True)
    print(f"{name:<13} edges={g.number_of_edges():4d} top degrees={degrees[:5]} "
          f"connected={nx.is_connected(g)}")
