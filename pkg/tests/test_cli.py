import re
import subprocess
import sys

import pytest

from kerbwsn.cli import main

SMALL = "scenario.seed = 3\nenergy.initial_energy = 40000\nrun.max_ticks = 400\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_handshake_prints_five_numbered_steps(capsys):
    code, out, _ = run_cli(capsys, "handshake")
    assert code == 0
    steps = re.findall(r"^(\d)\. ", out, re.M)
    assert steps == ["1", "2", "3", "4", "5"]
    assert "TgsRequest" in out and "ApRequest" in out


def test_cross_realm_uses_both_tgs(capsys):
    code, out, _ = run_cli(capsys, "cross-realm")
    assert code == 0
    assert "TGS exchanges: WSN=1 FIELD=1" in out


def test_output_is_byte_identical_across_runs(capsys):
    first = run_cli(capsys, "handshake")[1]
    assert run_cli(capsys, "handshake")[1] == first


def test_figures_written_and_deterministic(tmp_path, capsys):
    sc = tmp_path / "small.txt"
    sc.write_text(SMALL)
    texts = {}
    for which in (10, 11, 12, 13):
        out = tmp_path / f"f{which}.csv"
        assert run_cli(capsys, "figure", "--which", str(which), "--out", str(out),
                       "--scenario", str(sc))[0] == 0
        texts[which] = out.read_text()
    assert texts[10].startswith("users,total_bytes\n")
    assert texts[11].startswith("tick,remaining_milliunits\n")
    assert texts[13].startswith("initial_energy,lifetime_ticks\n")
    # authentication keeps the station alive longer under unauthorized load
    assert texts[12].count("\n") > texts[11].count("\n")
    again = tmp_path / "again.csv"
    run_cli(capsys, "figure", "--which", "12", "--out", str(again), "--scenario", str(sc))
    assert again.read_text() == texts[12]


def test_run_writes_all_figures(tmp_path, capsys):
    sc = tmp_path / "small.txt"
    sc.write_text(SMALL)
    code, out, _ = run_cli(capsys, "run", "--scenario", str(sc), "--out-dir",
                           str(tmp_path / "out"))
    assert code == 0 and "lifetime with authentication" in out
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == [
        "figure10.csv", "figure11.csv", "figure12.csv", "figure13.csv"]


def test_attack_report_passes(capsys):
    code, out, _ = run_cli(capsys, "attack-report", "--seeds", "3")
    assert code == 0
    assert out.rstrip().endswith("PASS: all attacks blocked with auth on")


def test_attack_report_exit_3_when_an_attack_is_served(monkeypatch, capsys):
    from kerbwsn import threats

    def always_served(tw):
        out = threats.AttackOutcome("broken", tw.auth_enabled)
        out.attempts.append(threats.Attempt("no-op", True, None))
        return out

    monkeypatch.setitem(threats.ATTACKS, "broken", always_served)
    code, out, _ = run_cli(capsys, "attack-report", "--seeds", "1")
    assert code == 3 and "FAIL" in out


@pytest.mark.parametrize("argv", [[], ["nope"], ["figure", "--which", "9", "--out", "x"],
                                  ["attack-report", "--seeds", "0"], ["run"]])
def test_usage_errors_exit_1(argv, capsys):
    assert run_cli(capsys, *argv)[0] == 1


def test_scenario_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("topology.n_nodes = lots\n")
    code, _, err = run_cli(capsys, "handshake", "--scenario", str(bad))
    assert code == 2 and "line 1" in err
    assert run_cli(capsys, "handshake", "--scenario", str(tmp_path / "missing.txt"))[0] == 2


def test_scenario_dir_environment_lookup(tmp_path, monkeypatch, capsys):
    (tmp_path / "named.txt").write_text("scenario.seed = 5\n")
    monkeypatch.setenv("KERBWSN_SCENARIO_DIR", str(tmp_path))
    assert run_cli(capsys, "handshake", "--scenario", "named.txt")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kerbwsn", "handshake"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.count("\n") == 6
