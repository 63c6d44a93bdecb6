"""End-to-end runs: settings file in, model directory and report out.

A settings file is INI with a ``[model]`` section::

    [model]
    case_name = sc
    substation_csv = sc_substations.csv
    branch_csv = sc_branches.csv
    n_utilities = 4
    n_bas = 1
    topology = star
    seed = 0
    output_dir = out/sc
    # optional
    degree_profile = profile.json
    protocol_table = protocols.json

Relative paths resolve against the settings file's directory.
"""

from __future__ import annotations

import configparser
import dataclasses
import json
import os
import statistics as stats
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .cyber import ProtocolTable, build_cyber_model
from .errors import GenerationError, InputError, SettingsError
from .geo import CACHE_ENV, SubstationDistances, file_digest
from .ingest import load_case, validate_case
from .metrics import MetricsReport, metrics_report, path_stats
from .placement import plan_sites
from .serialization import (INDEX, IoError, _write_atomic, emit_model, export_lan_graph,
                            export_wan_graph, load_model)
from .wan import DEFAULT_PROFILE, DegreeProfile, InvalidProfile, Topology, benchmark_graphs, build_wan, statistics_graph

SECTION = "model"
REQUIRED = ("case_name", "substation_csv", "branch_csv", "n_utilities", "n_bas", "topology", "output_dir")
GENERATORS = ("statistics", "havel_hakimi", "chung_lu")
LOCK_NAME = ".gridcyber.lock"
REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"


@dataclass(frozen=True)
class Settings:
    case_name: str
    substation_csv: Path
    branch_csv: Path
    n_utilities: int
    n_bas: int
    topology: str
    output_dir: Path
    seed: int = 0
    degree_profile: Path | None = None
    protocol_table: Path | None = None

    def __post_init__(self):
        if self.topology not in {t.value for t in Topology}:
            raise SettingsError(f"topology {self.topology!r} is not one of star, radial, statistics")
        if self.n_utilities < 1 or self.n_bas < 1:
            raise SettingsError("n_utilities and n_bas must be positive")
        if self.n_bas > self.n_utilities:
            raise SettingsError(f"n_bas ({self.n_bas}) exceeds n_utilities ({self.n_utilities})")

    def with_overrides(self, **overrides) -> "Settings":
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "output_dir" in changes:
            changes["output_dir"] = Path(changes["output_dir"])
        return dataclasses.replace(self, **changes)

    def echo(self) -> dict:
        return {k: (str(v) if isinstance(v, Path) else v) for k, v in dataclasses.asdict(self).items()
                if k not in ("substation_csv", "branch_csv", "output_dir", "degree_profile",
                             "protocol_table")}

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Settings":
        path = Path(path)
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with path.open(encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise SettingsError(f"cannot read settings file {path}: {exc.strerror or exc}") from None
        except configparser.Error as exc:
            raise SettingsError(f"{path}: {exc.message}") from None
        if not parser.has_section(SECTION):
            raise SettingsError(f"{path}: missing [{SECTION}] section")
        sec = parser[SECTION]
        missing = [k for k in REQUIRED if not sec.get(k)]
        if missing:
            raise SettingsError(f"{path}: missing keys {', '.join(missing)}")
        base = path.parent

        def resolve(value: str | None) -> Path | None:
            if not value:
                return None
            p = Path(value).expanduser()
            return p if p.is_absolute() else base / p

        def integer(key: str, default: int | None = None) -> int:
            raw = sec.get(key)
            if raw is None:
                return default  # type: ignore[return-value]
            try:
                return int(raw)
            except ValueError:
                raise SettingsError(f"{path}: {key} must be an integer, got {raw!r}") from None

        return cls(case_name=sec["case_name"], substation_csv=resolve(sec["substation_csv"]),
                   branch_csv=resolve(sec["branch_csv"]), n_utilities=integer("n_utilities"),
                   n_bas=integer("n_bas"), topology=sec["topology"].strip().lower(),
                   output_dir=resolve(sec["output_dir"]), seed=integer("seed", 0),
                   degree_profile=resolve(sec.get("degree_profile")),
                   protocol_table=resolve(sec.get("protocol_table")))


def write_settings(settings: Settings, path: str | os.PathLike) -> Path:
    parser = configparser.ConfigParser()
    parser[SECTION] = {k: str(v) for k, v in dataclasses.asdict(settings).items() if v is not None}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        parser.write(fh)
    return path


class OutputLocked(GenerationError):
    pass


class OutputLock:
    """Exclusive lock file in the output directory; stale locks of dead processes are taken over."""

    def __init__(self, directory: Path):
        self.path = directory / LOCK_NAME

    def __enter__(self) -> "OutputLock":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        for _ in range(2):
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                if self._stale():
                    self.path.unlink(missing_ok=True)
                    continue
                raise OutputLocked(f"{self.path.parent} is in use by another run ({self.path})") from None
            with os.fdopen(fd, "w") as fh:
                fh.write(str(os.getpid()))
            return self
        raise OutputLocked(f"cannot acquire {self.path}")

    def _stale(self) -> bool:
        try:
            pid = int(self.path.read_text().strip())
        except (OSError, ValueError):
            return False
        try:
            os.kill(pid, 0)
        except ProcessLookupError:
            return True
        except PermissionError:
            return False
        return False

    def __exit__(self, *exc) -> None:
        self.path.unlink(missing_ok=True)


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "gridcyber"


@dataclass
class GenerateResult:
    output_dir: Path
    model_files: list[Path]
    graph_files: list[Path]
    report: MetricsReport
    timings: dict[str, float]
    distance_cache_hit: bool | None


def _load_inputs(settings: Settings):
    for p in (settings.substation_csv, settings.branch_csv):
        if not Path(p).is_file():
            raise InputError(f"input file {p} does not exist")
    case = load_case(settings.case_name, settings.substation_csv, settings.branch_csv)
    report = validate_case(case)
    if report.dangling_endpoints or report.out_of_range:
        raise InputError("; ".join(report.lines()[:3]))
    try:
        profile = DegreeProfile.load(settings.degree_profile) if settings.degree_profile else DEFAULT_PROFILE
    except InvalidProfile as exc:
        raise SettingsError(str(exc)) from None
    protocols = ProtocolTable.load(settings.protocol_table) if settings.protocol_table else ProtocolTable.default()
    return case, profile, protocols


def run_generate(settings: Settings, graph_format: str = "graphml", export_lans: bool = True) -> GenerateResult:
    """Run one configuration end to end.

    Outputs under ``settings.output_dir``: the model files (index last),
    ``graphs/wan.<fmt>``, ``graphs/lan/<site>.<fmt>`` and ``report.json`` /
    ``report.txt``.  On failure no index file is left behind.
    """
    out = Path(settings.output_dir)
    with OutputLock(out):
        try:
            return _generate(settings, out, graph_format, export_lans)
        except BaseException:
            (out / INDEX).unlink(missing_ok=True)
            raise


def _generate(settings: Settings, out: Path, graph_format: str, export_lans: bool) -> GenerateResult:
    case, profile, protocols = _load_inputs(settings)
    distances = None
    if settings.topology != Topology.STAR.value:
        # warm-up (or cache hit) is kept outside the timed generation stage
        key = file_digest(settings.substation_csv, settings.branch_csv)
        distances = SubstationDistances([s.sub_id for s in case.substations],
                                        [s.coord for s in case.substations], cache_dir(), key)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if settings.n_utilities > len(case.substations):
        raise SettingsError(f"n_utilities ({settings.n_utilities}) exceeds the number of substations "
                            f"({len(case.substations)})")
    plan = plan_sites(case, settings.n_utilities, settings.n_bas, settings.seed)
    dist_fn = None if distances is None else (lambda a, b: distances.between(a.sub_id, b.sub_id))
    wan = build_wan(settings.topology, case, plan, profile=profile, seed=settings.seed, distance=dist_fn)
    model = build_cyber_model(case, plan, wan, protocols,
                              metadata={"settings": settings.echo(), "seeds": {"placement": settings.seed,
                                                                              "topology": settings.seed}})
    timings["generation"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    report = metrics_report(wan, model)
    timings["metrics"] = time.perf_counter() - t0

    graph_files = [export_wan_graph(wan, fmt, out / "graphs" / f"wan.{fmt}") for fmt in ("dot", "graphml")]
    if export_lans:
        lan_dir = out / "graphs" / "lan"
        if lan_dir.is_dir():
            for stale in lan_dir.iterdir():
                stale.unlink()
        for site in model.sites():
            graph_files.append(export_lan_graph(site, graph_format, lan_dir / f"{site.key}.{graph_format}"))

    files = emit_model(model, out, timings=timings, record_stage="serialization")
    timings = json.loads((out / INDEX).read_text(encoding="utf-8"))["timings"]
    report.generation_time = {k: float(timings[k]) for k in ("generation", "serialization", "metrics")}
    _write_report(report, out)
    return GenerateResult(out, files, graph_files, report, report.generation_time,
                          None if distances is None else distances.from_cache)


def _write_report(report: MetricsReport, out: Path) -> None:
    try:
        _write_atomic(out / REPORT_JSON, report.to_json())
        _write_atomic(out / REPORT_TXT, report.table())
    except OSError as exc:
        raise IoError(f"cannot write report to {out}: {exc}") from None


def run_metrics(model_dir: str | os.PathLike, output: str | os.PathLike | None = None,
                literal: bool = False) -> tuple[MetricsReport, Path]:
    """Recompute the report from a serialized model; nothing is regenerated."""
    model_dir = Path(model_dir)
    model = load_model(model_dir)
    if model.wan is None:
        raise InputError(f"{model_dir} holds no WAN graph")
    t0 = time.perf_counter()
    report = metrics_report(model.wan, model, literal=literal)
    timings = {k: float(v) for k, v in model.timings.items()}
    timings["metrics"] = time.perf_counter() - t0
    report.generation_time = timings
    dest = Path(output) if output else model_dir / "metrics-report.json"
    try:
        _write_atomic(dest, report.to_json())
    except OSError as exc:
        raise IoError(f"cannot write {dest}: {exc}") from None
    return report, dest


@dataclass(frozen=True)
class ComparisonRow:
    generator: str
    nodes: int
    seeds: int
    l_ave: float
    diameter: float
    max_degree: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def compare_samples(nodes: int, seeds: Iterable[int], profile: DegreeProfile = DEFAULT_PROFILE,
                    generators: Sequence[str] = GENERATORS) -> dict[str, list[tuple[float, int, int]]]:
    """Per generator, ``(l_ave, diameter, max_degree)`` for each seed."""
    unknown = sorted(set(generators) - set(GENERATORS))
    if unknown:
        raise SettingsError(f"unknown generators: {', '.join(unknown)}")
    out: dict[str, list[tuple[float, int, int]]] = {g: [] for g in generators}
    for seed in seeds:
        ref = statistics_graph(nodes, profile, seed=seed)
        graphs = {"statistics": ref}
        if set(generators) - {"statistics"}:
            graphs.update(benchmark_graphs(ref, seed=seed))
        for name in generators:
            g = graphs[name]
            ps = path_stats(g)
            out[name].append((ps.l_ave, ps.diameter, max(d for _, d in g.degree())))
    return out


def run_compare(nodes: Sequence[int] = (50, 500), seeds: int = 10,
                generators: Sequence[str] = GENERATORS,
                profile: DegreeProfile = DEFAULT_PROFILE) -> list[ComparisonRow]:
    """One row of per-seed medians for each generator and size."""
    rows = []
    for n in nodes:
        samples = compare_samples(n, range(seeds), profile, generators)
        for g in generators:
            s = samples[g]
            rows.append(ComparisonRow(g, n, seeds, stats.median(x[0] for x in s),
                                      stats.median(x[1] for x in s), stats.median(x[2] for x in s)))
    return rows


def comparison_table(rows: Sequence[ComparisonRow]) -> str:
    head = f"{'generator':<14}{'nodes':>7}{'seeds':>7}{'l_ave':>10}{'diameter':>10}{'max_deg':>9}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.generator:<14}{r.nodes:>7}{r.seeds:>7}{r.l_ave:>10.3f}"
                     f"{r.diameter:>10.1f}{r.max_degree:>9.1f}")
    return "\n".join(lines) + "\n"


def run_export(model_dir: str | os.PathLike, fmt: str, output: str | os.PathLike,
               site: str | None = None) -> Path:
    """Export the WAN graph of a serialized model, or the LAN of one site (``sub12``, ``utl2``, ``ba1``)."""
    model = load_model(model_dir)
    if site is None:
        if model.wan is None:
            raise InputError(f"{model_dir} holds no WAN graph")
        return export_wan_graph(model.wan, fmt, output)
    for s in model.sites():
        if s.key == site:
            return export_lan_graph(s, fmt, output)
    raise InputError(f"no site {site!r} in {model_dir}")
