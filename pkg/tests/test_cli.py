import json

import pytest

from latticeflow.cli import main
from latticeflow.schema import SchemaError, check_csv, check_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_mincut_closed_form(capsys):
    code, out, err = run_cli(
        capsys, "mincut", "--dist", "const:1", "--polygon", "square:1", "--n", "3", "--seed", "7"
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "maxflow")
    assert doc["value_micro"] == 29360128  # 28 * 2^20
    assert doc["stabilized"] is True
    assert doc["source_size"] == 49
    assert "resolved config" in err


def test_mu_closed_form(capsys):
    code, out, _ = run_cli(
        capsys, "mu", "--dist", "const:1", "--dir", "1,0", "--n", "32", "--reps", "5", "--seed", "1"
    )
    assert code == 0
    check_csv(out, "mu")
    row = [ln for ln in out.splitlines() if not ln.startswith(("#", "direction"))][0]
    assert row == "1,0,32,5,1048576,0.0"


def test_mu_json_format(capsys):
    code, out, _ = run_cli(
        capsys, "mu", "--dist", "exp:1", "--dir", "1,1", "--n", "8", "--reps", "3",
        "--seed", "2", "--format", "json",
    )
    assert code == 0
    check_json(json.loads(out), "mu")


def test_rerun_byte_identical(capsys):
    argv = ["converge", "--dist", "exp:1", "--polygon", "square:1", "--ngrid", "1,2",
            "--reps", "2", "--seed", "42"]
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    check_csv(out1, "convergence")


def test_converge_json_summary(capsys):
    code, out, _ = run_cli(
        capsys, "converge", "--dist", "const:1", "--polygon", "square:1",
        "--ngrid", "1,2,4", "--reps", "1", "--seed", "3", "--format", "json", "--eps", "0.3",
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "summary")
    means = [row["mean"] for row in doc["per_n"]]
    assert means == [1.5, 1.25, 1.125]
    assert [row["deviation_frequency"] for row in doc["per_n"]] == [1.0, 0.0, 0.0]


def test_tail_json(capsys):
    code, out, _ = run_cli(
        capsys, "tail", "--dist", "const:1", "--polygon", "square:1", "--ngrid", "1,2",
        "--reps", "2", "--eps", "1/20", "--seed", "4",
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "tail")
    assert doc["rows"][0]["frequency"] == 1.0  # ratio 1.5 at n=1, deterministic


def test_tail_csv(capsys):
    code, out, _ = run_cli(
        capsys, "tail", "--dist", "const:1", "--polygon", "square:1", "--ngrid", "1,2",
        "--reps", "2", "--eps", "0.6", "--seed", "4", "--format", "csv",
    )
    assert code == 0
    check_csv(out, "tail")


def test_disjoint_csv_and_counts(capsys):
    code, out, _ = run_cli(
        capsys, "disjoint", "--polygon", "square:1", "--ngrid", "2", "--reps", "1",
        "--p", "1", "--seed", "5",
    )
    assert code == 0
    check_csv(out, "disjoint")
    row = [ln for ln in out.splitlines() if not ln.startswith(("#", "n,"))][0]
    assert row.split(",")[2] == "20"  # 4*(2*2+1) boundary bonds, all open


def test_oracle_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, "oracle", "--dist", "const:1", "--polygon", "square:1/2", "--n", "3",
        "--seed", "6",
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "oracle")
    assert doc["value_micro"] == 4 << 20
    assert doc["source_size"] == 1


def test_maxflow_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, "maxflow", "--dist", "bern:0.7", "--polygon", "square:1/2", "--seed", "8"
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "maxflow")
    assert doc["stabilized"] is False  # single truncated solve


def test_ifun_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, "ifun", "--dist", "const:1", "--polygon", "square:1", "--n", "8",
        "--reps", "2", "--seed", "9",
    )
    assert code == 0
    doc = json.loads(out)
    check_json(doc, "ifun")
    assert doc["i_micro"] == str(8 << 20)
    assert doc["i_units"] == 8.0


def test_usage_errors_exit_one(capsys):
    assert run_cli(capsys)[0] == 1  # no subcommand
    assert run_cli(capsys, "mincut")[0] == 1  # missing required flags
    assert run_cli(capsys, "mincut", "--dist", "const:1", "--polygon", "square:1",
                   "--bogus", "1")[0] == 1  # unknown flag rejected
    assert run_cli(capsys, "mu", "--dist", "gauss:1", "--dir", "1,0")[0] == 1
    assert run_cli(capsys, "oracle", "--dist", "const:1", "--polygon", "square:1/2",
                   "--n", "9")[0] == 1  # oracle guard reported as usage error


def test_help_exits_zero(capsys):
    assert run_cli(capsys, "--help")[0] == 0


def test_budget_exceeded_exits_two_with_output(capsys):
    code, out, _ = run_cli(
        capsys, "mincut", "--dist", "const:1", "--polygon", "square:1/2", "--n", "1",
        "--seed", "1", "--nmax-factor", "1",
    )
    assert code == 2
    doc = json.loads(out)  # partial result still written
    assert doc["stabilized"] is False
    assert doc["value_micro"] == 4 << 20


def test_out_file(tmp_path, capsys):
    path = tmp_path / "res.json"
    code, out, _ = run_cli(
        capsys, "mincut", "--dist", "const:1", "--polygon", "square:1", "--n", "1",
        "--seed", "1", "--out", str(path),
    )
    assert code == 0
    assert out == ""
    check_json(json.loads(path.read_text()), "maxflow")


def test_version_stamp_and_config_hash(capsys):
    _, out1, _ = run_cli(capsys, "mu", "--dist", "const:1", "--dir", "1,0",
                         "--n", "8", "--reps", "2", "--seed", "1")
    _, out2, _ = run_cli(capsys, "mu", "--dist", "const:1", "--dir", "1,0",
                         "--n", "8", "--reps", "2", "--seed", "2")
    stamp1 = out1.splitlines()[0]
    stamp2 = out2.splitlines()[0]
    assert stamp1.startswith("# latticeflow 0.1.0 config_sha256=")
    assert stamp1 != stamp2  # different flags, different hash


def test_schema_checker_rejects_garbage():
    with pytest.raises(SchemaError):
        check_csv("a,b\n1,2\n", "mu")
    with pytest.raises(SchemaError):
        check_json({"value_micro": 3}, "maxflow")
    with pytest.raises(SchemaError):
        check_json({}, "nonsense")
