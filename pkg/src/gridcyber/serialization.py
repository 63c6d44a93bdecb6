"""JSON model files and DOT / GraphML graph exports.

A model directory holds one JSON document per site plus ``index.json``::

    index.json
    regulatories/ba<b>.json
    utilities/utl<u>.json
    substations/sub<id>.json

The index carries the schema version, case metadata, the WAN graph, stage
timings and the list of site files.  It is written last; a directory without
an index is an incomplete emission.  All JSON is UTF-8 with sorted keys, so an
unchanged model always produces identical bytes.  Field reference:
``docs/formats.md``.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path
from typing import Any, Iterable

import networkx as nx

from .cyber.model import (AclRule, CyberLink, CyberModel, CyberNode, DataFlow, NodeClass, Regulatory,
                          Site, Substation, Utility, Vlan)
from .errors import InputError
from .ingest import SubstationKind
from .wan.topology import LinkKind, Media, NodeKind, Topology, WanGraph, WanLink, WanNode

SCHEMA_VERSION = "1.0"
SUPPORTED_VERSIONS = ("1.0",)
INDEX = "index.json"
SITE_DIRS = {"regulatory": "regulatories", "utility": "utilities", "substation": "substations"}


class IoError(InputError):
    pass


class SchemaMismatch(InputError):
    pass


class DanglingReference(InputError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# encoding -----------------------------------------------------------------


def _node_doc(n: CyberNode) -> dict:
    return {"node_id": n.node_id, "node_class": n.node_class.value, "role": n.role,
            "region": n.region, "utility": n.utility, "substation": n.substation,
            "label": n.label, "ip_address": n.ip_address, "vlan": int(n.vlan),
            "open_ports": [[p, t] for p, t in n.open_ports], "protocols": list(n.protocols)}


def _link_doc(l: CyberLink) -> dict:
    return {"source": l.source, "destination": l.destination, "media": l.media,
            "bandwidth": l.bandwidth, "distance": l.distance, "protocols": list(l.protocols)}


def _flow_doc(f: DataFlow) -> dict:
    return {"src": f.src, "dst": f.dst, "protocol": f.protocol, "port": f.port,
            "bidirectional": f.bidirectional}


def _acl_doc(a: AclRule) -> dict:
    return {"firewall": a.firewall, "action": a.action, "src_cidr": a.src_cidr,
            "dst_cidr": a.dst_cidr, "protocol": a.protocol, "port": a.port, "name": a.name}


def _site_doc(site: Site, kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "site_kind": kind, "label": site.label,
            "coord": list(site.coord), "networklan": site.networklan,
            "nodes": [_node_doc(n) for n in site.nodes], "links": [_link_doc(l) for l in site.links],
            "dataflows": [_flow_doc(f) for f in site.dataflows],
            "acls": [_acl_doc(a) for a in site.acls]}


def wan_doc(wan: WanGraph) -> dict:
    return {"topology": wan.topology.value, "metadata": wan.metadata,
            "nodes": [{"node_id": n.node_id, "kind": n.kind.value, "owner": n.owner,
                       "coord": list(n.coord), "sub_id": n.sub_id, "utility": n.utility, "ba": n.ba}
                      for n in wan.nodes],
            "links": [{"a": l.endpoint_a, "b": l.endpoint_b, "media": l.media.value,
                       "bandwidth": l.bandwidth, "length": l.length, "link_kind": l.link_kind.value}
                      for l in wan.links]}


def model_documents(model: CyberModel, timings: dict | None = None) -> tuple[dict[str, dict], dict]:
    """``({relative path: site document}, index document)``."""
    docs: dict[str, dict] = {}
    for reg in model.regulatories:
        d = _site_doc(reg, "regulatory")
        d.update(index=reg.index, utilities=[u.key for u in reg.utilities])
        docs[f"regulatories/{reg.key}.json"] = d
        for utl in reg.utilities:
            d = _site_doc(utl, "utility")
            d.update(index=utl.index, region=utl.region, regulatory=reg.key,
                     substations=[s.key for s in utl.substations])
            docs[f"utilities/{utl.key}.json"] = d
            for sub in utl.substations:
                d = _site_doc(sub, "substation")
                d.update(sub_id=sub.sub_id, name=sub.name, kind=sub.kind.value,
                         relaynum=sub.relaynum, index=sub.index, utility=utl.key)
                docs[f"substations/{sub.key}.json"] = d
    index = {"schema_version": SCHEMA_VERSION,
             "case": {"name": model.case_name, "topology": model.topology},
             "metadata": model.metadata,
             "regulatories": [f"regulatories/{r.key}.json" for r in model.regulatories],
             "files": sorted(docs),
             "timings": dict(model.timings if timings is None else timings),
             "wan": None if model.wan is None else wan_doc(model.wan)}
    return docs, index


def emit_model(model: CyberModel, out_dir: str | os.PathLike, timings: dict | None = None,
               record_stage: str | None = None) -> list[Path]:
    """Write the model; returns every file written, index last.

    With ``record_stage`` the time spent encoding and writing the site files
    is stored under that key in the index timings.
    """
    start = time.perf_counter()
    out = Path(out_dir)
    docs, index = model_documents(model, timings)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / INDEX).unlink(missing_ok=True)
        for sub in SITE_DIRS.values():
            for stale in (out / sub).glob("*.json") if (out / sub).is_dir() else ():
                stale.unlink()
        written = []
        for rel in sorted(docs):
            path = out / rel
            _write_atomic(path, dumps(docs[rel]))
            written.append(path)
        if record_stage:
            index["timings"][record_stage] = time.perf_counter() - start
        _write_atomic(out / INDEX, dumps(index))
        written.append(out / INDEX)
    except OSError as exc:
        raise IoError(f"cannot write model to {out}: {exc}") from None
    return written


# decoding -----------------------------------------------------------------


def _read(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DanglingReference(f"referenced file {path} does not exist") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    version = data.get("schema_version") if isinstance(data, dict) else None
    if version not in SUPPORTED_VERSIONS:
        raise SchemaMismatch(f"{path.name}: schema_version {version!r} is not supported "
                             f"(supported: {', '.join(SUPPORTED_VERSIONS)})")
    return data


def _fill(site: Site, d: dict) -> None:
    site.networklan = d["networklan"]
    site.nodes = [CyberNode(node_id=n["node_id"], node_class=NodeClass(n["node_class"]),
                            role=n["role"], region=n["region"], utility=n["utility"],
                            label=n["label"], vlan=Vlan(n["vlan"]), substation=n["substation"],
                            ip_address=n["ip_address"],
                            open_ports=tuple((int(p), str(t)) for p, t in n["open_ports"]),
                            protocols=tuple(n["protocols"])) for n in d["nodes"]]
    site.links = [CyberLink(l["source"], l["destination"], l["media"], l["bandwidth"], l["distance"],
                            tuple(l["protocols"])) for l in d["links"]]
    site.dataflows = [DataFlow(f["src"], f["dst"], f["protocol"], f["port"], f["bidirectional"])
                      for f in d["dataflows"]]
    site.acls = [AclRule(a["firewall"], a["action"], a["src_cidr"], a["dst_cidr"], a["protocol"],
                         a["port"], a["name"]) for a in d["acls"]]


def _coord(c: Iterable) -> tuple[float, float]:
    a, b = c
    return (float(a), float(b))


def load_wan(d: dict) -> WanGraph:
    nodes = [WanNode(n["node_id"], NodeKind(n["kind"]), n["owner"], _coord(n["coord"]), n["sub_id"],
                     n["utility"], n["ba"]) for n in d["nodes"]]
    ids = {n.node_id for n in nodes}
    links = []
    for l in d["links"]:
        if l["a"] not in ids or l["b"] not in ids:
            raise DanglingReference(f"WAN link {l['a']}-{l['b']} references a missing node")
        links.append(WanLink(l["a"], l["b"], Media(l["media"]), l["bandwidth"], l["length"],
                             LinkKind(l["link_kind"])))
    return WanGraph(Topology(d["topology"]), nodes, links, d["metadata"])


def load_model(in_dir: str | os.PathLike) -> CyberModel:
    root = Path(in_dir)
    if not (root / INDEX).is_file():
        raise IoError(f"{root} holds no {INDEX}; not a model directory or emission incomplete")
    try:
        index = _read(root / INDEX)
        model = CyberModel(index["case"]["name"], index["case"]["topology"],
                           metadata=index["metadata"],
                           wan=None if index["wan"] is None else load_wan(index["wan"]),
                           timings=index["timings"])
        for rel in index["regulatories"]:
            rd = _read(root / rel)
            reg = Regulatory(label=rd["label"], coord=_coord(rd["coord"]), index=rd["index"])
            _fill(reg, rd)
            for ukey in rd["utilities"]:
                ud = _read(root / "utilities" / f"{ukey}.json")
                utl = Utility(label=ud["label"], coord=_coord(ud["coord"]), index=ud["index"],
                              region=ud["region"])
                _fill(utl, ud)
                for skey in ud["substations"]:
                    sd = _read(root / "substations" / f"{skey}.json")
                    sub = Substation(label=sd["label"], coord=_coord(sd["coord"]), sub_id=sd["sub_id"],
                                     name=sd["name"], kind=SubstationKind(sd["kind"]),
                                     relaynum=sd["relaynum"], index=sd["index"])
                    _fill(sub, sd)
                    utl.substations.append(sub)
                reg.utilities.append(utl)
            model.regulatories.append(reg)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"model document does not follow schema {SCHEMA_VERSION}: {exc!r}") from None
    check_references(model)
    return model


def check_references(model: CyberModel) -> None:
    """Raise :class:`DanglingReference` if any link, flow or rule names an unknown node."""
    known = set()
    for site in model.sites():
        own = {n.node_id for n in site.nodes}
        for l in site.links:
            if l.source not in own or l.destination not in own:
                raise DanglingReference(f"{site.label}: link {l.source}-{l.destination} "
                                        f"references a node outside the site")
        known |= own
    for site in model.sites():
        for f in site.dataflows:
            for end in (f.src, f.dst):
                if end not in known:
                    raise DanglingReference(f"{site.label}: flow endpoint {end} does not exist")
        for a in site.acls:
            if a.firewall not in known:
                raise DanglingReference(f"{site.label}: rule {a.name} names unknown firewall {a.firewall}")


# graph exports ------------------------------------------------------------


def _dot_value(v: Any) -> str:
    if isinstance(v, bool):
        return f'"{str(v).lower()}"'
    if isinstance(v, (int, float)):
        return repr(v)
    s = str(v).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def _dot_attrs(attrs: dict) -> str:
    return ", ".join(f"{k}={_dot_value(v)}" for k, v in attrs.items())


def write_dot(g: nx.Graph, path: Path, name: str) -> None:
    lines = [f"graph {_dot_value(name)} {{"]
    for v, attrs in g.nodes(data=True):
        lines.append(f"  {_dot_value(str(v))} [{_dot_attrs(attrs)}];")
    for a, b, attrs in g.edges(data=True):
        lines.append(f"  {_dot_value(str(a))} -- {_dot_value(str(b))} [{_dot_attrs(attrs)}];")
    lines.append("}")
    _write_atomic(path, "\n".join(lines) + "\n")


def _export(g: nx.Graph, fmt: str, out: str | os.PathLike, name: str) -> Path:
    path = Path(out)
    fmt = fmt.lower()
    try:
        if fmt == "dot":
            write_dot(g, path, name)
        elif fmt == "graphml":
            path.parent.mkdir(parents=True, exist_ok=True)
            nx.write_graphml(g, path)
        else:
            raise ValueError(f"unknown graph format {fmt!r}; expected dot or graphml")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None
    return path


def wan_networkx(graph: WanGraph) -> nx.Graph:
    g = nx.Graph()
    for n in graph.nodes:
        g.add_node(str(n.node_id), kind=n.kind.value, owner=n.owner, lat=n.coord[0], lon=n.coord[1],
                   pos=f"{n.coord[1]},{n.coord[0]}")
    for l in graph.links:
        g.add_edge(str(l.endpoint_a), str(l.endpoint_b), kind=l.link_kind.value, length=l.length,
                   media=l.media.value, bandwidth=l.bandwidth)
    return g


def lan_networkx(site: Site) -> nx.Graph:
    g = nx.Graph()
    for n in site.nodes:
        g.add_node(n.node_id, node_class=n.node_class.value, role=n.role, vlan=int(n.vlan),
                   ip_address=n.ip_address, label=n.label)
    for l in site.links:
        g.add_edge(l.source, l.destination, media=l.media, bandwidth=l.bandwidth,
                   protocols=",".join(l.protocols))
    return g


def export_wan_graph(graph: WanGraph, fmt: str, out: str | os.PathLike) -> Path:
    return _export(wan_networkx(graph), fmt, out, f"wan_{graph.topology.value}")


def export_lan_graph(site: Site, fmt: str, out: str | os.PathLike) -> Path:
    return _export(lan_networkx(site), fmt, out, site.label)
