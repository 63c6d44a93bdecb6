"""Reading substation and branch tables exported from a power-system tool.

Two CSV files describe a case: one row per substation (location, identity,
bus count, voltage, generation and load) and one row per branch (the two
substation numbers it joins).  Header names are matched case-insensitively
after trimming; unknown columns are ignored.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import InputError


class MissingColumn(InputError):
    pass


class MalformedRow(InputError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class DuplicateSubId(InputError):
    pass


class SubstationKind(str, enum.Enum):
    GENERATION = "Generation"
    TRANSMISSION = "Transmission"


@dataclass(frozen=True)
class SubstationRecord:
    longitude: float
    latitude: float
    sub_id: int
    sub_name: str
    area_name: str
    zone: str
    bus_count: int
    nominal_kv: float
    gen_mw: float | None = None
    gen_mvar: float | None = None
    load_mw: float | None = None
    load_mvar: float | None = None

    @property
    def coord(self) -> tuple[float, float]:
        return (self.latitude, self.longitude)


@dataclass(frozen=True)
class BranchRecord:
    sub_from: int
    sub_to: int

    @property
    def is_self_loop(self) -> bool:
        return self.sub_from == self.sub_to


@dataclass
class GridCase:
    case_name: str
    substations: list[SubstationRecord]
    branches: list[BranchRecord] = field(default_factory=list)

    def __post_init__(self):
        if not self.substations:
            raise InputError(f"case {self.case_name!r} has no substations")

    def by_id(self) -> dict[int, SubstationRecord]:
        return {s.sub_id: s for s in self.substations}


# canonical field -> accepted header spellings (compared lower-cased)
SUBSTATION_COLUMNS: dict[str, tuple[str, ...]] = {
    "longitude": ("lon.", "lon", "longitude"),
    "latitude": ("lat.", "lat", "latitude"),
    "sub_id": ("sub#", "sub #", "sub num", "subnum", "sub number", "number"),
    "sub_name": ("sub name", "subname", "name"),
    "area_name": ("area name", "areaname", "area"),
    "zone": ("zone", "zone name"),
    "bus_count": ("#buses", "# buses", "buses", "num buses"),
    "nominal_kv": ("kv", "nom kv", "nominal kv"),
    "gen_mw": ("gen(mw)", "gen mw", "genmw"),
    "gen_mvar": ("gen(mvar)", "gen mvar", "genmvar"),
    "load_mw": ("load(mw)", "load mw", "loadmw"),
    "load_mvar": ("load(mvar)", "load mvar", "loadmvar"),
}
OPTIONAL_SUBSTATION_COLUMNS = frozenset({"gen_mvar", "load_mw", "load_mvar"})

BRANCH_COLUMNS: dict[str, tuple[str, ...]] = {
    "sub_from": ("subnumberfrom", "sub number from", "from"),
    "sub_to": ("subnumberto", "sub number to", "to"),
}

# headers used when writing
SUBSTATION_HEADER = ["Lon.", "Lat.", "Sub#", "Sub Name", "Area Name", "Zone",
                     "#Buses", "kV", "Gen(MW)", "Gen(Mvar)", "Load(MW)", "Load(Mvar)"]
BRANCH_HEADER = ["SubNumberFrom", "SubNumberTo"]


def _resolve_header(header: list[str], columns: dict[str, tuple[str, ...]],
                    optional: frozenset[str] = frozenset()) -> dict[str, int]:
    lowered = [h.strip().lower() for h in header]
    positions: dict[str, int] = {}
    for name, aliases in columns.items():
        for alias in aliases:
            if alias in lowered:
                positions[name] = lowered.index(alias)
                break
        else:
            if name not in optional:
                raise MissingColumn(f"required column {aliases[0]!r} not found in header")
    return positions


def _read_rows(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{path}: file has no header row") from None
        rows = [row for row in reader if any(cell.strip() for cell in row)]
    return header, rows


def _cell(row: list[str], pos: int) -> str:
    return row[pos].strip() if pos < len(row) else ""


def _number(text: str, column: str, row_index: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(f"row {row_index}: column {column!r} is not numeric: {text!r}",
                           row=row_index) from None
    if not math.isfinite(value):
        raise MalformedRow(f"row {row_index}: column {column!r} is not finite", row=row_index)
    return value


def _integer(text: str, column: str, row_index: int) -> int:
    value = _number(text, column, row_index)
    if value != int(value):
        raise MalformedRow(f"row {row_index}: column {column!r} must be an integer: {text!r}",
                           row=row_index)
    return int(value)


def _optional(text: str, column: str, row_index: int) -> float | None:
    return None if text == "" else _number(text, column, row_index)


def parse_substations(path: str | os.PathLike) -> list[SubstationRecord]:
    """Parse the substation table.

    Row indices in error messages count data rows from 1.
    """
    header, rows = _read_rows(path)
    pos = _resolve_header(header, SUBSTATION_COLUMNS, OPTIONAL_SUBSTATION_COLUMNS)
    records: list[SubstationRecord] = []
    seen: set[int] = set()
    for i, row in enumerate(rows, start=1):
        get = lambda name: _cell(row, pos[name]) if name in pos else ""  # noqa: E731
        sub_id = _integer(get("sub_id"), "sub_id", i)
        bus_count = _integer(get("bus_count"), "bus_count", i)
        if sub_id < 1:
            raise MalformedRow(f"row {i}: sub_id must be positive", row=i)
        if bus_count < 1:
            raise MalformedRow(f"row {i}: bus_count must be at least 1", row=i)
        kv = _number(get("nominal_kv"), "nominal_kv", i)
        if kv < 0:
            raise MalformedRow(f"row {i}: nominal_kv must be nonnegative", row=i)
        if sub_id in seen:
            raise DuplicateSubId(f"row {i}: sub_id {sub_id} appears more than once")
        seen.add(sub_id)
        records.append(SubstationRecord(
            longitude=_number(get("longitude"), "longitude", i),
            latitude=_number(get("latitude"), "latitude", i),
            sub_id=sub_id,
            sub_name=get("sub_name"),
            area_name=get("area_name"),
            zone=get("zone"),
            bus_count=bus_count,
            nominal_kv=kv,
            gen_mw=_optional(get("gen_mw"), "gen_mw", i),
            gen_mvar=_optional(get("gen_mvar"), "gen_mvar", i),
            load_mw=_optional(get("load_mw"), "load_mw", i),
            load_mvar=_optional(get("load_mvar"), "load_mvar", i),
        ))
    return records


def parse_branches(path: str | os.PathLike) -> list[BranchRecord]:
    header, rows = _read_rows(path)
    pos = _resolve_header(header, BRANCH_COLUMNS)
    return [
        BranchRecord(_integer(_cell(row, pos["sub_from"]), "sub_from", i),
                     _integer(_cell(row, pos["sub_to"]), "sub_to", i))
        for i, row in enumerate(rows, start=1)
    ]


def load_case(case_name: str, substation_csv: str | os.PathLike,
              branch_csv: str | os.PathLike) -> GridCase:
    return GridCase(case_name, parse_substations(substation_csv), parse_branches(branch_csv))


def classify(sub: SubstationRecord) -> SubstationKind:
    if sub.gen_mw is not None and sub.gen_mw > 0:
        return SubstationKind.GENERATION
    return SubstationKind.TRANSMISSION


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return repr(float(value)) if value != int(value) else str(int(value))


def write_substations(records: Iterable[SubstationRecord], path: str | os.PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SUBSTATION_HEADER)
        for r in records:
            w.writerow([repr(r.longitude), repr(r.latitude), r.sub_id, r.sub_name, r.area_name,
                        r.zone, r.bus_count, _fmt(r.nominal_kv), _fmt(r.gen_mw),
                        _fmt(r.gen_mvar), _fmt(r.load_mw), _fmt(r.load_mvar)])
    return path


def write_branches(records: Iterable[BranchRecord], path: str | os.PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(BRANCH_HEADER)
        for b in records:
            w.writerow([b.sub_from, b.sub_to])
    return path


@dataclass
class ValidationReport:
    dangling_endpoints: list[BranchRecord] = field(default_factory=list)
    out_of_range: list[int] = field(default_factory=list)
    isolated: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not (self.dangling_endpoints or self.out_of_range or self.isolated)

    def lines(self) -> list[str]:
        out = [f"dangling branch endpoint: {b.sub_from} -> {b.sub_to}" for b in self.dangling_endpoints]
        out += [f"coordinates out of range: substation {s}" for s in self.out_of_range]
        out += [f"isolated substation: {s}" for s in self.isolated]
        return out


def validate_case(case: GridCase) -> ValidationReport:
    """Report dangling branches, out-of-range coordinates and isolated substations.

    Self-loop branches do not count as connecting a substation.
    """
    ids = {s.sub_id for s in case.substations}
    report = ValidationReport()
    touched: set[int] = set()
    for b in case.branches:
        if b.sub_from not in ids or b.sub_to not in ids:
            report.dangling_endpoints.append(b)
        elif not b.is_self_loop:
            touched.update((b.sub_from, b.sub_to))
    for s in case.substations:
        if not (-90 <= s.latitude <= 90 and -180 <= s.longitude <= 180):
            report.out_of_range.append(s.sub_id)
        if s.sub_id not in touched:
            report.isolated.append(s.sub_id)
    return report
