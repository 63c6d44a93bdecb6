# # Aligning a generated layout with substation geography
#
# A point cloud is rotated by a known angle, then scaled and shuffled.  The
# rotation-grid search recovers the angle and the point correspondence.

# %%
import numpy as np

from gridcyber.wan.overlay import align_overlay

rng = np.random.default_rng(0)
cyber = rng.random((300, 2))
theta = np.deg2rad(47.0)
rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
xy = (cyber - cyber.mean(axis=0)) @ rot.T * 2.5
perm = rng.permutation(len(xy))
power = np.column_stack([xy[perm, 1] + 34.0, xy[perm, 0] - 81.0])  # (lat, lon)

al = align_overlay(cyber, power)
hits = sum(al.mapping[i] == j for i, j in enumerate(np.argsort(perm)))
print(f"angle {al.angle_deg:.1f} deg, cost {al.cost:.2e}, correct matches {hits}/{len(cyber)}")

# %% [markdown]
# With noise the grid still lands near the true angle; the optimal
# assignment can only lower the matching cost.

# %%
noisy = power + rng.normal(scale=0.02, size=power.shape)
greedy = align_overlay(cyber[:120], noisy[np.argsort(perm)][:120])
best = align_overlay(cyber[:120], noisy[np.argsort(perm)][:120], optimal=True)
print(f"greedy {greedy.angle_deg:.0f} deg cost {greedy.cost:.3f}; optimal {best.angle_deg:.0f} deg cost {best.cost:.3f}")
