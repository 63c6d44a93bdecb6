"""Deterministic IPv4 plan.

=================  ======================  =====================================
site               network                 hosts
=================  ======================  =====================================
substation         ``10.u.s.0/24``         OT .10-.63 then .1-.9, admin .65-.127,
                                           infrastructure .250-.254
utility (UCC)      ``172.16.u.0/24``       see ``UCC_HOSTS``
BA                 ``192.168.b.0/24``      see ``BA_HOSTS``
=================  ======================  =====================================

``u`` is the 1-based utility number across the whole model, ``s`` the 1-based
position of the substation inside its utility ordered by substation id, ``b``
the 1-based BA number.
"""

from __future__ import annotations

from ..errors import GenerationError
from .model import CyberModel, Site

MAX_OCTET = 254
MAX_RELAYS = 61  # .12-.63 plus .1-.9

SUBSTATION_HOSTS = {
    "outstation": 10, "relay_controller": 11, "db": 65, "web": 66,
    "ot_switch": 250, "admin_switch": 251, "firewall": 253, "router": 254,
}
UCC_HOSTS = {
    "ems": 10, "hmi": 11, "iccp": 130, "dmz_db": 131, "corp_firewall": 200,
    "internal_switch": 250, "dmz_switch": 251, "firewall": 253, "router": 254,
}
BA_HOSTS = {"iccp_server": 10, "hmi": 11, "switch": 250, "firewall": 253, "router": 254}


class AddressSpaceExhausted(GenerationError):
    pass


def relay_host(r: int) -> int:
    """Host octet of the ``r``-th relay (1-based)."""
    if r < 1 or r > MAX_RELAYS:
        raise AddressSpaceExhausted(f"relay {r} does not fit the OT range (max {MAX_RELAYS})")
    return 11 + r if r <= 52 else r - 52


def _assign(site: Site, prefix: str, hosts: dict[str, int]) -> None:
    site.networklan = f"{prefix}.0/24"
    relay = 0
    for node in site.nodes:
        if node.role == "relay":
            relay += 1
            octet = relay_host(relay)
        else:
            octet = hosts[node.role]
        node.ip_address = f"{prefix}.{octet}"


def assign_addressing(model: CyberModel) -> CyberModel:
    """Fill ``networklan`` and every node's ``ip_address`` in place."""
    regs = model.regulatories
    if len(regs) > MAX_OCTET:
        raise AddressSpaceExhausted(f"{len(regs)} balancing authorities exceed {MAX_OCTET}")
    utilities = sorted(model.utilities(), key=lambda u: u.index)
    if utilities and utilities[-1].index > MAX_OCTET:
        raise AddressSpaceExhausted(f"{utilities[-1].index} utilities exceed {MAX_OCTET}")
    for reg in regs:
        _assign(reg, f"192.168.{reg.index}", BA_HOSTS)
    for utl in utilities:
        _assign(utl, f"172.16.{utl.index}", UCC_HOSTS)
        if len(utl.substations) > MAX_OCTET:
            raise AddressSpaceExhausted(
                f"utility {utl.label} has {len(utl.substations)} substations, limit {MAX_OCTET}")
        for sub in utl.substations:
            _assign(sub, f"10.{utl.index}.{sub.index}", SUBSTATION_HOSTS)
    return model
