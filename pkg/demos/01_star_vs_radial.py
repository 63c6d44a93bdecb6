# # Star and radial WANs on a synthetic 208-substation grid
#
# A synthetic case with the footprint of the South Carolina system is split
# into four utilities and one balancing authority.  The same placement is
# wired twice: every substation straight to its control centre (star), then
# along transmission lines (radial).

# %%
from gridcyber.metrics import metrics_report
from gridcyber.placement import plan_sites
from gridcyber.synthetic import preset_case
from gridcyber.wan import build_radial, build_star

case = preset_case("sc")
plan = plan_sites(case, n_utilities=4, n_bas=1, seed=0)
print(len(case.substations), "substations,", len(case.branches), "branches")
for u in plan.utilities:
    print(plan.utility_labels[u.cluster_id], len(u.member_sub_ids), "substations at",
          tuple(round(c, 3) for c in u.centroid))

# %% [markdown]
# Star: S + 2U + B routers and firewalls, S + 2U links, diameter 6.

# %%
star = build_star(case, plan)
print(metrics_report(star).table())

# %% [markdown]
# Radial: generation substations hang off a transmission neighbour in the
# same utility.  Paths get longer, and generation substations touching
# several transmission substations add links beyond S + 2U.

# %%
radial = build_radial(case, plan)
print(metrics_report(radial).table())
print("generation substations without an in-utility neighbour:",
      radial.metadata["orphan_generation_fallbacks"])
