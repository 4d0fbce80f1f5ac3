import json

import pytest

from algoqkd import cli
from algoqkd.config import load_run_settings, parse_config_text
from algoqkd.lincode import CodeRequirement, construct_code, write_code
from algoqkd.protocol import ConfigError

GOOD = "n = 64\nm = 6\np = 0.02\nepsilon = 0.05  # margin\ndelta = 0.05\ncode_seed = 3\n"


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(GOOD)
    return path


def test_config_parsing(cfg, tmp_path):
    s = load_run_settings(cfg)
    assert s.template.n == 64 and s.template.code.m == 6 and s.pool_bits == 10**9
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text(GOOD + "colour = red\n")
    with pytest.raises(ConfigError, match="missing"):
        parse_config_text("n = 4\n")
    with pytest.raises(ConfigError, match="code_file or m"):
        parse_config_text("n = 4\np = 0\nepsilon = .1\ndelta = .1\n")


def test_config_with_code_file(tmp_path):
    code = construct_code(CodeRequirement.for_protocol(64, 6, 0.02, 0.05), seed=8)
    (tmp_path / "c.txt").write_text(write_code(code))
    path = tmp_path / "run.cfg"
    path.write_text("n = 64\np = 0.02\nepsilon = 0.05\ndelta = 0.05\ncode_file = c.txt\n")
    assert load_run_settings(path).template.code.generators == code.generators


def test_run_writes_tree(cfg, tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli.main(["run", "--config", str(cfg), "--seed", "4", "--sessions", "3",
                   "--attack", "intercept-random", "--out", str(out)])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    session = json.loads((out / "transcripts" / "session_000001.json").read_text())
    summary = json.loads((out / "summary.json").read_text())
    assert session["manifest_id"] == manifest["manifest_id"] == summary["manifest_id"]
    assert summary["sessions"] == 3 and "PROXY" in summary["caveat"]
    assert (out / "code.txt").read_text().startswith("64 6 ")
    assert "PROXY" in capsys.readouterr().out


def test_run_config_error_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(GOOD.replace("p = 0.02", "p = 0.47"))
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg"),
                     "--out", str(tmp_path / "o")]) == 2


def test_run_code_length_mismatch_names_invariant(tmp_path, capsys):
    code = construct_code(CodeRequirement.for_protocol(32, 4, 0.02, 0.05), seed=8)
    (tmp_path / "c.txt").write_text(write_code(code))
    path = tmp_path / "run.cfg"
    path.write_text("n = 64\np = 0.02\nepsilon = 0.05\ndelta = 0.05\ncode_file = c.txt\n")
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "code.n == n" in capsys.readouterr().err


def test_run_pool_exhaustion_exit_3(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(GOOD + "pool_bits = 100\n")
    rc = cli.main(["run", "--config", str(path), "--sessions", "5", "--out", str(tmp_path / "o")])
    assert rc == 3
    # the sessions that fit were written before the pool ran dry
    assert len(list((tmp_path / "o" / "transcripts").iterdir())) == 2


def test_manifest_timestamp_from_environment(cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["timestamp"].startswith(
        "1970-01-01")


def test_verify_suites(capsys):
    assert cli.main(["verify", "--suite", "lemma-a1", "--instances", "50"]) == 0
    assert cli.main(["verify", "--suite", "counting", "--m", "6"]) == 0
    assert cli.main(["verify", "--suite", "all", "--instances", "5", "--m", "4"]) == 0
    out = capsys.readouterr().out
    assert "lemma-a1" in out and "PASS" in out
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_otp(capsys, tmp_path):
    assert cli.main(["otp", "--m", "10", "--delta", "0.25", "--out", str(tmp_path / "o.json")]) == 0
    assert "computable compressor" in capsys.readouterr().out
    assert json.loads((tmp_path / "o.json").read_text())["holds"] is True
    assert cli.main(["otp", "--m", "15", "--delta", "0.25"]) == 2
    # a threshold below zero leaves nothing to count
    assert cli.main(["otp", "--m", "8", "--delta", "4"]) == 0
    assert " 0 " in capsys.readouterr().out


def test_keyrate_and_bound(capsys):
    assert cli.main(["keyrate", "--p", "0.01", "--epsilon", "0.01"]) == 0
    assert "0.6162" in capsys.readouterr().out
    assert cli.main(["keyrate", "--p", "0.2", "--epsilon", "0.1"]) == 0
    assert "warning" in capsys.readouterr().err
    assert cli.main(["keyrate", "--p", "0.4", "--epsilon", "0.2"]) == 2
    assert cli.main(["bound", "--n", "1024", "--delta", "0.05", "--epsilon", "0.05"]) == 0
    assert "vacuous" in capsys.readouterr().err
    assert cli.main(["bound", "--n", "0", "--delta", "0.05", "--epsilon", "0.05"]) == 2
