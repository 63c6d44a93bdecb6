from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from gridcyber.errors import InputError
from gridcyber.ingest import (BranchRecord, DuplicateSubId, GridCase, MalformedRow, MissingColumn,
                              SubstationKind, SubstationRecord, classify, load_case, parse_branches,
                              parse_substations, validate_case, write_branches, write_substations)

HEADER = "Lon.,Lat.,Sub#,Sub Name,Area Name,Zone,#Buses,kV,Gen(MW),Gen(Mvar),Load(MW),Load(Mvar)\n"


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_parse_substations_basic(tmp_path):
    p = _write(tmp_path, "s.csv", HEADER +
               "-80.1,33.2,1,A,SC,Z1,2,115,,,10.5,2\n"
               "-80.2,33.3,4,B,SC,Z1,3,345,120,10,,\n")
    subs = parse_substations(p)
    assert [s.sub_id for s in subs] == [1, 4]
    assert subs[0].coord == (33.2, -80.1)
    assert subs[0].gen_mw is None and subs[0].load_mw == 10.5
    assert classify(subs[0]) is SubstationKind.TRANSMISSION
    assert classify(subs[1]) is SubstationKind.GENERATION
    assert subs[1].bus_count == 3


def test_headers_case_insensitive_and_optional_columns(tmp_path):
    p = _write(tmp_path, "s.csv", "LON,lat,SUB#,sub name,AREA NAME,zone,#BUSES,KV,gen(mw)\n"
                                  "-80,33,7,X,SC,Z,1,138,0\n")
    (s,) = parse_substations(p)
    assert s.sub_id == 7 and s.load_mw is None and s.gen_mvar is None
    assert classify(s) is SubstationKind.TRANSMISSION  # zero generation is not generation


def test_missing_column(tmp_path):
    p = _write(tmp_path, "s.csv", "Lon.,Lat.,Sub#,Sub Name,Area Name,Zone,kV,Gen(MW)\n-80,33,1,A,B,C,1,0\n")
    with pytest.raises(MissingColumn, match="bus"):
        parse_substations(p)


@pytest.mark.parametrize("row", [
    "-80,33,x,A,SC,Z,1,138,,,,",      # non-integer id
    "-80,33,0,A,SC,Z,1,138,,,,",      # id < 1
    "-80,33,1,A,SC,Z,0,138,,,,",      # no buses
    "-80,33,1,A,SC,Z,2,-5,,,,",       # negative kV
    "abc,33,1,A,SC,Z,2,138,,,,",      # bad float
])
def test_malformed_rows(tmp_path, row):
    p = _write(tmp_path, "s.csv", HEADER + row + "\n")
    with pytest.raises(MalformedRow) as info:
        parse_substations(p)
    assert info.value.row == 1


def test_duplicate_sub_id(tmp_path):
    p = _write(tmp_path, "s.csv", HEADER + "-80,33,1,A,SC,Z,1,138,,,,\n-81,34,1,B,SC,Z,1,138,,,,\n")
    with pytest.raises(DuplicateSubId):
        parse_substations(p)


def test_branches_and_self_loops(tmp_path):
    p = _write(tmp_path, "b.csv", "SubNumberFrom,SubNumberTo\n1,2\n3,3\n")
    br = parse_branches(p)
    assert br == [BranchRecord(1, 2), BranchRecord(3, 3)]
    assert br[1].is_self_loop and not br[0].is_self_loop


def test_errors_are_input_errors():
    assert issubclass(MissingColumn, InputError) and issubclass(MalformedRow, InputError)
    with pytest.raises(InputError):
        GridCase("empty", [], [])


def _sub(i, lat=33.0, lon=-80.0, gen=None):
    return SubstationRecord(lon, lat, i, f"S{i}", "SC", "Z", 1, 138.0, gen, None, None, None)


def test_validate_case():
    case = GridCase("v", [_sub(1), _sub(2), _sub(3, lat=95.0), _sub(4)],
                    [BranchRecord(1, 2), BranchRecord(2, 9), BranchRecord(4, 4)])
    rep = validate_case(case)
    assert [(b.sub_from, b.sub_to) for b in rep.dangling_endpoints] == [(2, 9)]
    assert rep.out_of_range == [3]
    assert rep.isolated == [3, 4]  # the self-loop does not connect substation 4
    assert not rep.valid and len(rep.lines()) == 4


# text cells are whitespace-stripped on parse, so generate already-stripped names
names = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")),
                min_size=1, max_size=12).map(str.strip).filter(bool)
optional = st.one_of(st.none(), st.floats(0, 5000, allow_nan=False).map(lambda x: round(x, 3)))
records = st.lists(st.builds(
    SubstationRecord,
    longitude=st.floats(-180, 180, allow_nan=False), latitude=st.floats(-90, 90, allow_nan=False),
    sub_id=st.just(0), sub_name=names, area_name=names, zone=names,
    bus_count=st.integers(1, 60), nominal_kv=st.floats(0, 800, allow_nan=False).map(lambda x: round(x, 2)),
    gen_mw=optional, gen_mvar=optional, load_mw=optional, load_mvar=optional), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(records)
def test_write_parse_round_trip(tmp_path_factory, recs):
    recs = [dataclasses.replace(r, sub_id=i + 1) for i, r in enumerate(recs)]
    d = tmp_path_factory.mktemp("rt")
    write_substations(recs, d / "s.csv")
    write_branches([BranchRecord(1, len(recs))], d / "b.csv")
    case = load_case("rt", d / "s.csv", d / "b.csv")
    assert case.substations == recs
    assert case.branches == [BranchRecord(1, len(recs))]
