from __future__ import annotations

import json
import xml.etree.ElementTree as ET

import networkx as nx
import pydot
import pytest

from gridcyber.cyber import CyberModel
from gridcyber.serialization import (SCHEMA_VERSION, DanglingReference, IoError, SchemaMismatch, emit_model,
                                     export_lan_graph, export_wan_graph, load_model, write_dot)

from conftest import preset_model, preset_wan

GRAPHML = "{http://graphml.graphdrawing.org/xmlns}"


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*.json"))}


@pytest.mark.parametrize("topology", ["star", "statistics"])
def test_round_trip_and_file_count(tmp_path, topology):
    model = preset_model("sc", topology)
    written = emit_model(model, tmp_path)
    s, u, b = 208, 4, 1
    assert len(written) == s + u + b + 1
    assert written[-1].name == "index.json"
    back = load_model(tmp_path)
    assert back == model
    assert back.wan == model.wan


def test_reemission_is_byte_identical(tmp_path, sc_model):
    emit_model(sc_model, tmp_path / "a")
    emit_model(load_model(tmp_path / "a"), tmp_path / "b")
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")
    text = (tmp_path / "a" / "index.json").read_text()
    assert json.loads(text)["schema_version"] == SCHEMA_VERSION


def test_stale_files_removed_on_reemit(tmp_path, sc_model):
    emit_model(sc_model, tmp_path)
    (tmp_path / "substations" / "sub99999.json").write_text("{}")
    emit_model(sc_model, tmp_path)
    assert not (tmp_path / "substations" / "sub99999.json").exists()


def test_empty_model_writes_only_index(tmp_path):
    m = CyberModel("empty", "star")
    written = emit_model(m, tmp_path)
    assert [p.name for p in written] == ["index.json"]
    assert load_model(tmp_path) == m


def test_missing_index_and_schema_mismatch(tmp_path, sc_model):
    with pytest.raises(IoError):
        load_model(tmp_path)
    emit_model(sc_model, tmp_path)
    idx = tmp_path / "index.json"
    doc = json.loads(idx.read_text())
    doc["schema_version"] = "9.9"
    idx.write_text(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        load_model(tmp_path)


def test_dangling_reference_detected(tmp_path, sc_model):
    emit_model(sc_model, tmp_path)
    victim = sorted((tmp_path / "substations").glob("*.json"))[0]
    victim.unlink()
    with pytest.raises(DanglingReference):
        load_model(tmp_path)


def test_dangling_acl_firewall_detected(tmp_path, sc_model):
    emit_model(sc_model, tmp_path)
    path = sorted((tmp_path / "substations").glob("*.json"))[0]
    doc = json.loads(path.read_text())
    doc["acls"][0]["firewall"] = "sub0.nowhere"
    path.write_text(json.dumps(doc))
    with pytest.raises(DanglingReference):
        load_model(tmp_path)


def test_dot_four_node_star(tmp_path):
    g = nx.star_graph(3)
    nx.set_node_attributes(g, "x", "kind")
    write_dot(g, tmp_path / "s.dot", 'star "4"')
    (parsed,) = pydot.graph_from_dot_file(str(tmp_path / "s.dot"))
    nodes = [n for n in parsed.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    assert len(nodes) == 4 and len(parsed.get_edges()) == 3


def test_wan_exports_parse_back(tmp_path):
    wan = preset_wan("sc", "star")
    export_wan_graph(wan, "graphml", tmp_path / "wan.graphml")
    root = ET.parse(tmp_path / "wan.graphml").getroot()
    assert len(root.findall(f".//{GRAPHML}node")) == 217
    assert len(root.findall(f".//{GRAPHML}edge")) == 216
    export_wan_graph(wan, "dot", tmp_path / "wan.dot")
    (parsed,) = pydot.graph_from_dot_file(str(tmp_path / "wan.dot"))
    assert len(parsed.get_edges()) == 216
    with pytest.raises(ValueError):
        export_wan_graph(wan, "gexf", tmp_path / "wan.gexf")


def test_lan_exports(tmp_path, sc_model):
    sub = next(s for s in sc_model.substations() if s.relaynum == 2)
    utl = sc_model.regulatories[0].utilities[0]
    ba = sc_model.regulatories[0]
    for site, n in ((sub, 10), (utl, 9), (ba, 5)):
        path = export_lan_graph(site, "graphml", tmp_path / f"{site.key}.graphml")
        g = nx.read_graphml(path)
        assert g.number_of_nodes() == n and g.number_of_edges() == n - 1
