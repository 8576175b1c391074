import json

import pytest

from areamoments.cli import run

pytestmark = pytest.mark.usefixtures("capsys")


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_motzkin(capsys):
    code, out, err = _run(capsys, "analyze", "--steps", "-1:1,0:1,1:1")
    assert code == 0
    assert "ZeroDrift" in out
    assert "1.73205" in out
    assert err == ""


def test_analyze_periodic_warning_on_stderr(capsys):
    code, out, err = _run(capsys, "analyze", "--steps", "-1:1,1:1")
    assert code == 0
    assert "periodic" in err
    assert "periodic" not in out


def test_enumerate_csv_contract(capsys):
    code, out, _ = _run(capsys, "enumerate", "--steps", "-1:1,1:1",
                        "--class", "excursion", "--m", "4", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "class,m,area,altitude,weight"
    assert lines[2:] == ["excursion,4,2,0,1", "excursion,4,4,0,1"]


def test_limits_exact_and_float_columns(capsys):
    code, out, _ = _run(capsys, "limits", "--kind", "bea", "--n", "2",
                        "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "n,exact,float"
    assert lines[3].startswith("1,1/4 * 2^(1/2) * pi^(1/2),")
    assert lines[4].startswith("2,5/12,")


def test_limits_raw_table_kinds(capsys):
    code, out, _ = _run(capsys, "limits", "--kind", "k", "--n", "3",
                        "--format", "csv")
    assert code == 0
    assert out.strip().splitlines()[2:] == [
        "0,-1/2,-0.5", "1,1/8,0.125", "2,5/64,0.078125", "3,15/128,0.1171875"]
    code, out, _ = _run(capsys, "limits", "--kind", "dpm", "--k", "1",
                        "--l", "1", "--format", "csv")
    assert code == 0
    assert "1,1,1/32," in out


def test_json_round_trip(capsys):
    code, out, _ = _run(capsys, "moments", "--steps", "-1:1,1:1",
                        "--class", "meander", "--m-max", "4", "--n-max", "1",
                        "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["class", "m", "n", "t", "raw_sum", "total"]
    assert doc["config"]["subcommand"] == "moments"
    assert ["meander", "2", "1", "0", "4", "2"] in doc["rows"]


def test_byte_identical_reruns(capsys):
    args = ("converge", "--steps", "-1:1,1:1", "--class", "excursion",
            "--m", "8,16", "--orders", "1:0", "--format", "csv")
    _, out1, _ = _run(capsys, *args)
    _, out2, _ = _run(capsys, *args)
    assert out1 == out2


def test_csv_quotes_step_spec(capsys):
    code, out, _ = _run(capsys, "converge", "--steps", "-1:1,1:1",
                        "--class", "excursion", "--m", "8", "--orders", "1:0",
                        "--format", "csv")
    assert code == 0
    data_line = out.strip().splitlines()[2]
    assert data_line.startswith('"-1:1,1:1",excursion')


def test_validation_exit_code(capsys):
    code, _, err = _run(capsys, "analyze", "--steps", "1:1,2:1")
    assert code == 2
    assert "error[analyze.NoNegativeStep]" in err


def test_resource_exit_code(capsys):
    code, _, err = _run(capsys, "enumerate", "--steps", "-2:1,-1:1,1:1",
                        "--class", "walk", "--m", "40",
                        "--memory-budget", "1000")
    assert code == 3
    assert "OutOfMemoryBudget" in err


def test_config_file_merge_flags_win(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[global]\nformat = "csv"\n\n[limits]\nkind = "bea"\nn = 1\n'
    )
    code, out, _ = _run(capsys, "limits", "--kind", "bea", "--n", "1",
                        "--config", str(cfg))
    assert code == 0
    assert out.splitlines()[-1].startswith("1,")  # csv from config
    # flag wins over config
    code, out, _ = _run(capsys, "limits", "--kind", "bea", "--n", "1",
                        "--config", str(cfg), "--format", "json")
    assert code == 0
    json.loads(out)


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.csv"
    code, out, _ = _run(capsys, "limits", "--kind", "rayleigh", "--t", "4",
                        "--format", "csv", "--output", str(target))
    assert code == 0
    assert out == ""
    text = target.read_text()
    assert "4,8," in text  # E[R^4] = 8


def test_kernel_json_report(capsys):
    code, out, _ = _run(capsys, "kernel", "--steps", "-2:1,-1:1,1:1",
                        "--z", "0.15", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert {"tau", "rho", "beta", "regime"} <= set(doc["config"])
    assert doc["columns"][0] == "z"


def test_polyomino_enumerate_csv(capsys):
    code, out, _ = _run(capsys, "polyomino", "enumerate", "--hp-max", "4",
                        "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "hp,area,count"
    assert "2,1,1" in lines and "3,2,2" in lines


def test_selftest_passes(capsys):
    code, out, _ = _run(capsys, "selftest")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 6


def test_threads_validation(capsys):
    code, _, err = _run(capsys, "selftest", "--threads", "0")
    assert code == 2
