"""Assemble the full cyber-physical model from a case, a site plan and a WAN."""

from __future__ import annotations

from ..ingest import GridCase, classify
from ..placement import SitePlan
from ..wan.topology import WanGraph
from .addressing import assign_addressing
from .flows import FlowPaths, annotate_link_protocols, generate_dataflows, synthesize_acls
from .lan import LISTENS, build_ba_lan, build_substation_lan, build_ucc_lan
from .model import CyberModel
from .protocols import ProtocolTable


def _open_ports(model: CyberModel, protocols: ProtocolTable) -> None:
    for site in model.sites():
        for node in site.nodes:
            names = LISTENS.get(node.role, ())
            node.open_ports = tuple(sorted((protocols[p].port, protocols[p].transport) for p in names))


def build_cyber_model(case: GridCase, plan: SitePlan, wan: WanGraph | None = None,
                      protocols: ProtocolTable | None = None,
                      metadata: dict | None = None) -> CyberModel:
    protocols = protocols or ProtocolTable.default()
    topology = wan.topology.value if wan is not None else ""
    model = CyberModel(case.case_name, topology, wan=wan, metadata=dict(metadata or {}))
    model.metadata.setdefault("protocols", protocols.to_dict())
    by_id = case.by_id()
    for b, site in enumerate(plan.ba_sites):
        reg = build_ba_lan(site, plan, b)
        for u in plan.utilities_of_ba(b):
            cluster = plan.utilities[u]
            utl = build_ucc_lan(cluster, plan)
            for i, sid in enumerate(sorted(cluster.member_sub_ids), start=1):
                rec = by_id[sid]
                sub = build_substation_lan(rec, classify(rec), plan)
                sub.index = i
                utl.substations.append(sub)
            reg.utilities.append(utl)
        model.regulatories.append(reg)
    assign_addressing(model)
    _open_ports(model, protocols)
    generate_dataflows(model, protocols)
    synthesize_acls(model, protocols)
    annotate_link_protocols(model, FlowPaths(model))
    return model
