import json
import shutil
import subprocess
import sys

import pytest

from polyincidence.cli import main
from polyincidence.generators import gen_extremal_grid
from polyincidence.incidence import Config
from polyincidence.varieties import line_through


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_then_count(tmp_path, capsys):
    cfg = tmp_path / "g2.json"
    assert run(capsys, "generate", "--family", "extremal_grid", "--N", 2, "--out", cfg)[0] == 0
    code, out, _ = run(capsys, "count", "--config", cfg)
    assert code == 0
    assert "incidences=16" in out.splitlines()


def test_generated_config_embeds_manifest(tmp_path, capsys):
    cfg = tmp_path / "r.json"
    run(capsys, "generate", "--family", "random", "--n", 10, "--m", 3, "--d", 4, "--k", 2, "--seed", 5,
        "--out", cfg)
    doc = json.loads(cfg.read_text())
    assert doc["manifest"]["seeds"] == {"seed": 5}
    assert doc["metadata"]["spec"]["family"] == "random"


def test_mismatched_dimensions_exit_2(tmp_path, capsys):
    doc = gen_extremal_grid(1).to_json()
    doc["points"][0] = ["1", "2", "3"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "count", "--config", bad)
    assert code == 2 and "error" in err


def test_duplicate_lines_fail_axiom_ii(tmp_path, capsys):
    f = line_through((0, 0), (1, 1))
    cfg = Config(2, 1, [(0, 0), (1, 1), (3, 3)], [f, f])
    path = tmp_path / "dup.json"
    path.write_text(cfg.dumps())
    code, out, err = run(capsys, "check-axioms", "--config", path, "--C0", 1)
    assert code == 1
    assert "axiom (ii): fail" in out
    assert "(ii)" in err


def test_axioms_pass_on_grid(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(gen_extremal_grid(3).dumps())
    code, out, _ = run(capsys, "check-axioms", "--config", path, "--out", tmp_path / "ax.json")
    assert code == 0 and out.count(": pass") == 5


def test_unknown_flag_exit_2(capsys):
    code, _, err = run(capsys, "count", "--bogus")
    assert code == 2 and "usage" in err


def test_missing_subcommand_and_file(tmp_path, capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "count", "--config", tmp_path / "nope.json")[0] == 2


def test_bad_fraction_flag(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(gen_extremal_grid(1).dumps())
    assert run(capsys, "partition", "--config", path, "--tau", "abc")[0] == 2


def _pipeline(tmp_path, capsys):
    cfg, part = tmp_path / "cfg.json", tmp_path / "part.json"
    inc, rep = tmp_path / "inc.csv", tmp_path / "report.csv"
    assert run(capsys, "generate", "--family", "random", "--n", 60, "--m", 12, "--d", 2, "--k", 1,
               "--plant", 30, "--seed", 3, "--out", cfg)[0] == 0
    assert run(capsys, "partition", "--config", cfg, "--rounds", 3, "--seed", 3, "--out", part)[0] == 0
    code, out, _ = run(capsys, "count", "--config", cfg, "--partition", part, "--out", inc)
    assert code == 0
    assert run(capsys, "report", "--config", cfg, "--incidences", inc, "--epsilon", "1/20", "--out", rep)[0] == 0
    return {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}, out


def test_pipeline_is_byte_identical(tmp_path, capsys):
    first, out1 = _pipeline(tmp_path, capsys)
    for p in tmp_path.iterdir():
        p.unlink()
    second, out2 = _pipeline(tmp_path, capsys)
    assert first == second and out1 == out2
    assert "report.csv.manifest.json" in first and "inc.csv.manifest.json" in first


def test_partitioned_count_matches_bruteforce(tmp_path, capsys):
    cfg, part = tmp_path / "g.json", tmp_path / "p.json"
    run(capsys, "generate", "--family", "extremal_grid", "--N", 4, "--out", cfg)
    run(capsys, "partition", "--config", cfg, "--rounds", 4, "--out", part)
    _, brute, _ = run(capsys, "count", "--config", cfg)
    _, fast, _ = run(capsys, "count", "--config", cfg, "--partition", part)
    assert brute.splitlines()[0] == fast.splitlines()[0] == "incidences=256"
    fast_pairs = int(fast.splitlines()[1].split("=")[1])
    assert fast_pairs < 128 * 64


def test_partition_from_other_config_is_usage_error(tmp_path, capsys):
    a, b, part = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "p.json"
    run(capsys, "generate", "--family", "extremal_grid", "--N", 2, "--out", a)
    run(capsys, "generate", "--family", "extremal_grid", "--N", 3, "--out", b)
    run(capsys, "partition", "--config", a, "--out", part)
    assert run(capsys, "count", "--config", b, "--partition", part)[0] == 2


def test_rich_and_project(tmp_path, capsys):
    cfg, img = tmp_path / "r.json", tmp_path / "img.json"
    run(capsys, "generate", "--family", "random", "--n", 20, "--m", 6, "--d", 3, "--k", 1, "--plant", 10,
        "--out", cfg)
    code, out, _ = run(capsys, "project", "--config", cfg, "--seed", 1, "--out", img)
    assert code == 0 and "projected to R^2" in out
    _, before, _ = run(capsys, "count", "--config", cfg)
    _, after, _ = run(capsys, "count", "--config", img)
    assert before.splitlines()[0] == after.splitlines()[0]
    code, out, _ = run(capsys, "rich", "--config", img, "--r", 2)
    assert code == 0 and out.startswith("point,multiplicity")


def test_project_in_the_plane_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "g.json"
    run(capsys, "generate", "--family", "extremal_grid", "--N", 2, "--out", cfg)
    code, _, err = run(capsys, "project", "--config", cfg)
    assert code == 2 and "d must exceed 2k" in err


def test_report_and_fit(tmp_path, capsys):
    cfgs = []
    for N in range(2, 6):
        path = tmp_path / f"g{N}.json"
        run(capsys, "generate", "--family", "extremal_grid", "--N", N, "--out", path)
        cfgs.append(path)
    rep, table = tmp_path / "rep.csv", tmp_path / "loglog.txt"
    assert run(capsys, "report", "--config", *cfgs, "--out", rep)[0] == 0
    code, out, _ = run(capsys, "fit", "--report", rep, "--table", table, "--expect", 1, "--tol", 0.01)
    assert code == 0 and out.startswith("slope=1.000000")
    assert len(table.read_text().splitlines()) == 4
    code, _, err = run(capsys, "fit", "--report", rep, "--expect", 2)
    assert code == 1 and "outside" in err


def test_console_script(tmp_path):
    exe = shutil.which("polyincidence")
    cmd = [exe] if exe else [sys.executable, "-m", "polyincidence.cli"]
    out = subprocess.run(cmd + ["generate", "--family", "extremal_grid", "--N", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["d"] == 2
    bad = subprocess.run(cmd + ["frobnicate"], capture_output=True, text=True)
    assert bad.returncode == 2
