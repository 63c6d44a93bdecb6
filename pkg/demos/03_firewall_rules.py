# # Data flows and firewall rules of a small utility model
#
# Twelve substations, two utilities, one balancing authority.  Every flow is
# traced through the firewalls on its path, and every rule is checked for a
# flow that needs it.

# %%
from gridcyber.cyber import FlowPaths, blocked_flows, build_cyber_model, unjustified_rules
from gridcyber.metrics import acl_counts
from gridcyber.placement import plan_sites
from gridcyber.synthetic import synthetic_case
from gridcyber.wan import build_star

case = synthetic_case(12, seed=1)
plan = plan_sites(case, 2, 1, seed=1)
model = build_cyber_model(case, plan, build_star(case, plan))
print(acl_counts(model))

# %% [markdown]
# The first substation: its LAN, its address block and its three rules.

# %%
sub = next(model.substations())
print(sub.label, sub.networklan, f"{sub.relaynum} relays")
for n in sub.nodes:
    print(f"  {n.node_id:<24} {n.node_class.value:<16} vlan {int(n.vlan):<3} {n.ip_address}")
for r in sub.acls:
    print(f"  {r.name:<10} {r.action:<5} {r.src_cidr:>16} -> {r.dst_cidr:<16} {r.protocol}/{r.port}")

# %% [markdown]
# The utility control centre's rules end in a deny-all.

# %%
utl = next(model.utilities())
for r in utl.acls:
    print(f"  {r.name:<12} {r.action:<5} {r.src_cidr:>16} -> {r.dst_cidr:<16} {r.protocol}/{r.port}")

# %%
paths = FlowPaths(model)
print("flows:", sum(1 for _ in model.all_flows()))
print("blocked flows:", blocked_flows(model, paths))
print("rules with no flow behind them:", unjustified_rules(model, paths))
