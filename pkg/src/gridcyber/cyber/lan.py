"""Fixed LAN templates for substations, utility control centers and BAs.

Node ids are ``<site key>.<role>`` (``sub12.relay3``, ``utl2.ems``,
``ba1.iccp_server``) and therefore globally unique.  Every intra-LAN link has
distance 0.
"""

from __future__ import annotations

from ..ingest import SubstationKind, SubstationRecord
from ..placement import Cluster, SitePlan
from .model import CyberLink, CyberNode, NodeClass, Regulatory, Site, Substation, Utility, Vlan

LAN_BPS = 1_000_000_000

# role -> (class, vlan)
SUBSTATION_ROLES = {
    "relay_controller": (NodeClass.RELAY_CONTROLLER, Vlan.OT),
    "outstation": (NodeClass.HOST, Vlan.OT),
    "ot_switch": (NodeClass.SWITCH, Vlan.OT),
    "db": (NodeClass.HOST, Vlan.ADMIN),
    "web": (NodeClass.HOST, Vlan.ADMIN),
    "admin_switch": (NodeClass.SWITCH, Vlan.ADMIN),
    "firewall": (NodeClass.FIREWALL, Vlan.ROUTING),
    "router": (NodeClass.ROUTER, Vlan.ROUTING),
}
SUBSTATION_WIRING = [
    ("relay_controller", "ot_switch"), ("outstation", "ot_switch"), ("ot_switch", "firewall"),
    ("db", "admin_switch"), ("web", "admin_switch"), ("admin_switch", "firewall"),
    ("firewall", "router"),
]

UCC_ROLES = {
    "router": (NodeClass.ROUTER, Vlan.ROUTING),
    "firewall": (NodeClass.FIREWALL, Vlan.ROUTING),
    "internal_switch": (NodeClass.SWITCH, Vlan.OT),
    "ems": (NodeClass.HOST, Vlan.OT),  # also the SCADA master
    "hmi": (NodeClass.HOST, Vlan.OT),
    "dmz_switch": (NodeClass.SWITCH, Vlan.DMZ),
    "iccp": (NodeClass.HOST, Vlan.DMZ),
    "dmz_db": (NodeClass.HOST, Vlan.DMZ),
    "corp_firewall": (NodeClass.FIREWALL, Vlan.ADMIN),  # stub, nothing behind it
}
UCC_WIRING = [
    ("ems", "internal_switch"), ("hmi", "internal_switch"), ("internal_switch", "firewall"),
    ("iccp", "dmz_switch"), ("dmz_db", "dmz_switch"), ("dmz_switch", "firewall"),
    ("corp_firewall", "firewall"), ("firewall", "router"),
]

BA_ROLES = {
    "router": (NodeClass.ROUTER, Vlan.ROUTING),
    "firewall": (NodeClass.FIREWALL, Vlan.ROUTING),
    "switch": (NodeClass.SWITCH, Vlan.DMZ),
    "iccp_server": (NodeClass.HOST, Vlan.DMZ),
    "hmi": (NodeClass.HOST, Vlan.DMZ),
}
BA_WIRING = [("iccp_server", "switch"), ("hmi", "switch"), ("switch", "firewall"),
             ("firewall", "router")]

# role -> protocols the host listens on
LISTENS = {
    "outstation": ("DNP3",), "relay_controller": ("DNP3",), "db": ("SQL",), "web": ("HTTPS",),
    "hmi": ("HTTPS",), "iccp": ("ICCP",), "iccp_server": ("ICCP",),
}
SPEAKS = {
    "outstation": ("DNP3", "SQL"), "relay_controller": ("DNP3",), "db": ("SQL",),
    "web": ("HTTPS",), "ems": ("DNP3",), "hmi": ("HTTPS",), "iccp": ("ICCP",),
    "iccp_server": ("ICCP",),
}


def _coord(c) -> tuple[float, float]:
    return (round(float(c[0]), 6), round(float(c[1]), 6))


def _populate(site: Site, key: str, roles: dict, wiring: list[tuple[str, str]],
              region: str, utility: str, substation: str | None) -> None:
    for role, (cls, vlan) in roles.items():
        site.nodes.append(CyberNode(
            node_id=f"{key}.{role}", node_class=cls, role=role, region=region, utility=utility,
            label=f"{site.label}.{role}", vlan=vlan, substation=substation,
            protocols=SPEAKS.get(role, ())))
    for a, b in wiring:
        site.links.append(CyberLink(f"{key}.{a}", f"{key}.{b}", bandwidth=LAN_BPS))


def build_substation_lan(sub: SubstationRecord, kind: SubstationKind, plan: SitePlan) -> Substation:
    """OT and admin LANs behind one firewall; one relay per bus."""
    if sub.sub_id not in plan.sub_labels:
        raise KeyError(f"substation {sub.sub_id} is not in the site plan")
    u = plan.utility_of[sub.sub_id]
    site = Substation(label=plan.sub_labels[sub.sub_id], coord=_coord(sub.coord), sub_id=sub.sub_id,
                      name=sub.sub_name, kind=kind, relaynum=sub.bus_count)
    key = site.key
    utility = plan.utility_labels[u]
    region = plan.utility_regions[u]
    for r in range(1, sub.bus_count + 1):
        site.nodes.append(CyberNode(
            node_id=f"{key}.relay{r}", node_class=NodeClass.RELAY, role="relay", region=region,
            utility=utility, label=f"{site.label}.relay{r}", vlan=Vlan.OT, substation=site.label))
        site.links.append(CyberLink(f"{key}.relay{r}", f"{key}.ot_switch", bandwidth=LAN_BPS))
    _populate(site, key, SUBSTATION_ROLES, SUBSTATION_WIRING, region, utility, site.label)
    return site


def build_ucc_lan(utility: Cluster, plan: SitePlan) -> Utility:
    k = utility.cluster_id
    site = Utility(label=plan.utility_labels[k], coord=_coord(utility.centroid), index=k + 1,
                   region=plan.utility_regions[k])
    _populate(site, site.key, UCC_ROLES, UCC_WIRING, site.region, site.label, None)
    return site


def build_ba_lan(ba_site: tuple[float, float], plan: SitePlan, index: int) -> Regulatory:
    """``index`` is the 0-based BA position in ``plan``."""
    site = Regulatory(label=plan.ba_labels[index], coord=_coord(ba_site), index=index + 1)
    _populate(site, site.key, BA_ROLES, BA_WIRING, site.label, "", None)
    return site
