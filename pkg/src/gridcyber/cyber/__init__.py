from .addressing import AddressSpaceExhausted, assign_addressing
from .build import build_cyber_model
from .flows import (FlowPaths, annotate_link_protocols, blocked_flows, generate_dataflows, permits,
                    synthesize_acls, unjustified_rules)
from .lan import build_ba_lan, build_substation_lan, build_ucc_lan
from .model import (AclRule, CyberLink, CyberModel, CyberNode, DataFlow, NodeClass, Regulatory, Site,
                    Substation, Utility, Vlan)
from .protocols import PROTOCOLS, Binding, ProtocolTable

__all__ = [
    "AclRule", "AddressSpaceExhausted", "Binding", "CyberLink", "CyberModel", "CyberNode", "DataFlow",
    "FlowPaths", "NodeClass", "PROTOCOLS", "ProtocolTable", "Regulatory", "Site", "Substation",
    "Utility", "Vlan", "annotate_link_protocols", "assign_addressing", "blocked_flows",
    "build_ba_lan", "build_cyber_model", "build_substation_lan", "build_ucc_lan",
    "generate_dataflows", "permits", "synthesize_acls", "unjustified_rules",
]
