from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from gridcyber.cli import main
from gridcyber.errors import InputError, SettingsError
from gridcyber.pipeline import (LOCK_NAME, OutputLock, OutputLocked, Settings, comparison_table, run_compare,
                                run_export, run_generate, run_metrics, write_settings)
from gridcyber.serialization import load_model
from gridcyber.synthetic import preset_case, synthetic_case, write_case


def _settings(tmp_path, case=None, topology="star", utilities=4, bas=1, name="run") -> Path:
    case = case or preset_case("sc")
    sub_csv, br_csv = write_case(case, tmp_path / "inputs")
    s = Settings(case.case_name, sub_csv, br_csv, utilities, bas, topology, tmp_path / name)
    return write_settings(s, tmp_path / f"{name}.ini")


def _json_tree(root: Path, skip=("index.json",)):
    return {p.relative_to(root).as_posix(): p.read_text() for p in sorted(root.rglob("*.json"))
            if p.name not in skip and "report" not in p.name}


def test_settings_round_trip_and_validation(tmp_path):
    path = _settings(tmp_path)
    s = Settings.load(path)
    assert s.n_utilities == 4 and s.topology == "star" and s.output_dir == tmp_path / "run"
    with pytest.raises(SettingsError):
        s.with_overrides(topology="mesh")
    with pytest.raises(SettingsError):
        s.with_overrides(n_bas=5)
    (tmp_path / "bad.ini").write_text("[model]\ncase_name = x\n")
    with pytest.raises(SettingsError, match="missing keys"):
        Settings.load(tmp_path / "bad.ini")
    with pytest.raises(SettingsError):
        Settings.load(tmp_path / "nope.ini")


def test_generate_writes_expected_files(tmp_path):
    s = Settings.load(_settings(tmp_path))
    res = run_generate(s)
    out = s.output_dir
    assert len(res.model_files) == 208 + 4 + 1 + 1
    assert len(list((out / "graphs" / "lan").glob("*.graphml"))) == 213
    assert (out / "graphs" / "wan.dot").is_file() and (out / "graphs" / "wan.graphml").is_file()
    report = json.loads((out / "report.json").read_text())
    assert report["wan_node_count"] == 217 and report["acl_counts"]["total"] == 852
    assert set(res.timings) == {"generation", "serialization", "metrics"}
    assert all(v >= 0 for v in res.timings.values())
    assert res.distance_cache_hit is None
    assert not (out / LOCK_NAME).exists()


def test_generation_is_deterministic(tmp_path):
    path = _settings(tmp_path, topology="statistics")
    s = Settings.load(path)
    run_generate(s, export_lans=False)
    run_generate(s.with_overrides(output_dir=tmp_path / "again"), export_lans=False)
    assert _json_tree(tmp_path / "run") == _json_tree(tmp_path / "again")
    a = json.loads((tmp_path / "run" / "index.json").read_text())
    b = json.loads((tmp_path / "again" / "index.json").read_text())
    a.pop("timings"), b.pop("timings")
    assert a == b


def test_distance_cache_hit_on_second_radial_run(tmp_path):
    s = Settings.load(_settings(tmp_path, case=synthetic_case(80, seed=1), topology="radial", utilities=3))
    assert run_generate(s, export_lans=False).distance_cache_hit is False
    assert run_generate(s, export_lans=False).distance_cache_hit is True
    assert any(Path(os.environ["GRIDCYBER_CACHE_DIR"]).iterdir())


def test_metrics_rerun_matches_generation_report(tmp_path):
    s = Settings.load(_settings(tmp_path, topology="statistics"))
    res = run_generate(s, export_lans=False)
    report, dest = run_metrics(s.output_dir)
    assert dest == s.output_dir / "metrics-report.json"
    assert report.to_dict(timings=False) == res.report.to_dict(timings=False)
    assert report.generation_time["generation"] == res.timings["generation"]


def test_lock_blocks_concurrent_writers(tmp_path):
    out = tmp_path / "locked"
    with OutputLock(out):
        with pytest.raises(OutputLocked):
            with OutputLock(out):
                pass
    # a lock left by a dead process is taken over
    (out / LOCK_NAME).write_text("999999999\n")
    with OutputLock(out):
        pass
    assert not (out / LOCK_NAME).exists()


def test_failed_generation_leaves_no_index(tmp_path):
    s = Settings.load(_settings(tmp_path, case=synthetic_case(5, seed=0), utilities=2))
    run_generate(s, export_lans=False)
    assert (s.output_dir / "index.json").exists()
    with pytest.raises(SettingsError):
        run_generate(s.with_overrides(n_utilities=6, n_bas=1), export_lans=False)
    assert not (s.output_dir / "index.json").exists()


def test_missing_input_is_input_error(tmp_path):
    s = Settings.load(_settings(tmp_path))
    with pytest.raises(InputError):
        run_generate(s.with_overrides(substation_csv=tmp_path / "gone.csv"))


def test_compare_rows_and_table():
    rows = run_compare(nodes=(40,), seeds=2)
    assert [r.generator for r in rows] == ["statistics", "havel_hakimi", "chung_lu"]
    assert all(r.nodes == 40 and r.seeds == 2 and r.l_ave > 1 for r in rows)
    lines = comparison_table(rows[:1]).splitlines()
    assert len(lines) == 3 and lines[2].startswith("statistics")
    with pytest.raises(SettingsError):
        run_compare(nodes=(40,), seeds=1, generators=("bogus",))


def test_export_site_and_wan(tmp_path):
    s = Settings.load(_settings(tmp_path, case=synthetic_case(12, seed=0), utilities=2))
    run_generate(s, export_lans=False)
    p = run_export(s.output_dir, "dot", tmp_path / "utl1.dot", site="utl1")
    assert p.read_text().startswith("graph ")
    assert run_export(s.output_dir, "graphml", tmp_path / "wan.graphml").is_file()
    with pytest.raises(InputError):
        run_export(s.output_dir, "dot", tmp_path / "x.dot", site="sub999999")


def test_cli_exit_codes(tmp_path, capsys):
    path = _settings(tmp_path, case=synthetic_case(15, seed=0), utilities=2)
    assert main(["generate", "--settings", str(path), "--no-lan-graphs"]) == 0
    assert "wrote 19 model files" in capsys.readouterr().out
    assert main(["generate", "--settings", str(path), "--topology", "mesh"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("SettingsError:") and err.count("\n") == 1
    assert main(["generate", "--settings", str(path), "--utilities", "1", "--bas", "2"]) == 2
    capsys.readouterr()
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["metrics", str(empty)]) == 3
    assert capsys.readouterr().err.startswith("IoError:")
    assert main(["metrics", "--settings", str(path)]) == 0
    assert main(["export", "--settings", str(path), "--site", "ba1", "--format", "graphml"]) == 0
    assert (tmp_path / "run" / "ba1.graphml").is_file()
    assert main(["compare", "--nodes", "30", "--seeds", "1", "--generators", "statistics",
                 "--output", str(tmp_path / "cmp.json")]) == 0
    assert len(json.loads((tmp_path / "cmp.json").read_text())) == 1
    assert main(["compare", "--seeds", "0"]) == 2


def test_cli_generate_overrides(tmp_path):
    path = _settings(tmp_path, case=synthetic_case(30, seed=0), utilities=2)
    assert main(["generate", "--settings", str(path), "--topology", "statistics", "--utilities", "3",
                 "--seed", "4", "--output", str(tmp_path / "ovr"), "--format", "dot"]) == 0
    m = load_model(tmp_path / "ovr")
    assert m.topology == "statistics" and len(list(m.utilities())) == 3
    assert len(list((tmp_path / "ovr" / "graphs" / "lan").glob("*.dot"))) == 30 + 3 + 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gridcyber", "metrics", str(tmp_path)],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 3 and proc.stderr.startswith("IoError:")
