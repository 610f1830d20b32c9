import csv
import io
import json
import subprocess
import sys

import pytest

from edgepattern.cli import main, parse_n_list


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("n,count", [(2, "1"), (8, "100352"), (10, "557568000")])
def test_count(n, count, capsys):
    code, out, _ = run(["count", "--n", str(n)], capsys)
    assert code == 0 and out.strip() == count


@pytest.mark.parametrize("n", ["3", "0", "x"])
def test_count_rejects_bad_n(n, capsys):
    if n == "x":
        with pytest.raises(SystemExit) as exc:
            main(["count", "--n", n])
        assert exc.value.code == 2
    else:
        code, _, err = run(["count", "--n", n], capsys)
        assert code == 2 and "even" in err


@pytest.mark.parametrize("tier,n,lines", [(1, 4, 4), (2, 6, 192), (3, 6, 192)])
def test_enumerate_line_counts(tier, n, lines, tmp_path, capsys):
    out = tmp_path / "paths.jsonl"
    code, _, _ = run(["enumerate", "--n", str(n), "--tier", str(tier), "--out", str(out)], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == lines
    manifest = json.loads((tmp_path / "paths.manifest.json").read_text())
    assert manifest["counts"]["N"] == lines
    assert len(manifest["digests"]["records_sha256"]) == 64


def test_enumerate_dedup_to_stdout(capsys):
    code, out, err = run(["enumerate", "--n", "6", "--dedup"], capsys)
    assert code == 0
    recs = [json.loads(x) for x in out.splitlines()]
    assert len(recs) == 28
    assert len({r["canonical_key"] for r in recs}) == 28
    assert '"orbits": 28' in err


def test_enumerate_budget_abort(tmp_path, capsys):
    out = tmp_path / "t1.jsonl"
    code, _, err = run(["enumerate", "--n", "6", "--tier", "1", "--out", str(out)], capsys)
    assert code == 3
    assert not out.exists()
    manifest = json.loads((tmp_path / "t1.manifest.json").read_text())
    assert manifest["aborted"] and "max_candidates" in manifest["reason"]
    assert manifest["counts"]["records_written"] == 0


def test_enumerate_mid_run_abort_deletes_partial_output(tmp_path, capsys):
    out = tmp_path / "t3.jsonl"
    code, _, _ = run(["enumerate", "--n", "8", "--tier", "3", "--out", str(out), "--max-candidates", "30000"], capsys)
    assert code == 3 and not out.exists()


def test_enumerate_rejects_bad_budget(capsys):
    code, _, err = run(["enumerate", "--n", "4", "--max-seconds", "0"], capsys)
    assert code == 2


def test_cross_check_failure_exit_code(tmp_path, capsys, monkeypatch):
    import edgepattern.cli as cli

    monkeypatch.setattr(cli, "kirchhoff_count", lambda g: 5)
    code, _, err = run(["enumerate", "--n", "4", "--out", str(tmp_path / "x.jsonl")], capsys)
    assert code == 4 and "cross-check" in err


@pytest.fixture
def corpus6_file(tmp_path, capsys):
    path = tmp_path / "six.jsonl"
    assert main(["enumerate", "--n", "6", "--dedup", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


def test_filter_stages(corpus6_file, tmp_path, capsys):
    out = tmp_path / "f.jsonl"
    code, _, err = run(["filter", "--in", str(corpus6_file), "--corners", "--out", str(out)], capsys)
    assert code == 0 and "corners=11" in err and "output=11" in err
    code, _, err = run(["filter", "--in", str(out), "--self-symmetric", "--out", str(tmp_path / "s.jsonl")], capsys)
    assert "self_symmetric=1" in err
    code, out_text, err = run(["filter", "--in", str(out), "--line-trees", "--contraction"], capsys)
    assert "line_trees=1" in err and "contraction=1" in err
    rec = json.loads(out_text)
    assert rec["is_line_tree"] and rec["contraction_pass"] and all(rec["contraction_pass"])


def test_filter_reports_malformed_line(corpus6_file, tmp_path, capsys):
    lines = corpus6_file.read_text().splitlines()
    lines[4] = lines[4][:50]
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    code, _, err = run(["filter", "--in", str(bad), "--corners"], capsys)
    assert code == 2 and "line 5" in err


def test_filter_rejects_invalid_path(corpus6_file, tmp_path, capsys):
    rec = json.loads(corpus6_file.read_text().splitlines()[0])
    rec["steps"][3], rec["steps"][4] = rec["steps"][4], rec["steps"][3]
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps(rec) + "\n")
    code, _, err = run(["filter", "--in", str(bad)], capsys)
    assert code == 2 and "line 1: invalid path" in err


def test_filter_missing_input(capsys, tmp_path):
    code, _, err = run(["filter", "--in", str(tmp_path / "nope.jsonl")], capsys)
    assert code == 2


def test_render(corpus6_file, tmp_path, capsys):
    svg_dir = tmp_path / "svg"
    code, _, _ = run(["render", "--in", str(corpus6_file), "--svg-dir", str(svg_dir), "--marks", "corners"], capsys)
    assert code == 0 and len(list(svg_dir.glob("*.svg"))) == 28
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, _, _ = run(["render", "--in", str(empty), "--svg-dir", str(tmp_path / "none")], capsys)
    assert code == 0 and not list((tmp_path / "none").glob("*"))


def test_render_unwritable_dir(corpus6_file, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(["render", "--in", str(corpus6_file), "--svg-dir", str(blocker / "sub")], capsys)
    assert code == 2


def test_bench(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--n-list", "2,4,8", "--tiers", "1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [(r["n"], r["candidates"], r["aborted"]) for r in rows] == [
        ("2", "16", "false"),
        ("4", "65536", "false"),
        ("8", "0", "true"),
    ]


def test_bounds_table(capsys):
    code, out, _ = run(["bounds", "--n-list", "2..40"], capsys)
    rows = {r["n"]: r for r in csv.DictReader(io.StringIO(out))}
    assert len(rows) == 20
    assert rows["18"]["crossover"] == "true" and rows["16"]["crossover"] == "false"
    assert rows["6"]["feasible_square"] == "true" and rows["6"]["a"] == "18"
    assert rows["8"]["a"] == "30;34" and rows["8"]["edge_thickness"] == "16"


def test_n_list_parsing(capsys):
    assert parse_n_list("2..8") == [2, 4, 6, 8]
    assert parse_n_list("3..7,10") == [4, 6, 10]
    code, _, err = run(["bounds", "--n-list", "4,5"], capsys)
    assert code == 2
    code, _, _ = run(["bench", "--n-list", "4", "--tiers", "7"], capsys)
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "edgepattern", "count", "--n", "6"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "192"
