import json

import pandas as pd
import yaml

from caputo_scheme.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def test_coeff_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "coeff.csv"
    assert main(["coeff-sweep", "--alpha", "0.3", "0.6", "--n-max", "20", "--out", str(out)]) == EXIT_PASS
    df = pd.read_csv(out)
    assert df["alpha"].tolist() == [0.3, 0.6]
    assert "coeff-sweep: PASS 2/2 rows" in capsys.readouterr().out


def test_lemma41_sweep_json(tmp_path):
    out = tmp_path / "sweep.json"
    assert main(["lemma41-sweep", "--alpha", "0.25", "--n-max", "15", "--out", str(out)]) == EXIT_PASS
    records = json.loads(out.read_text())
    assert records[0]["first_pass_41"] == 2
    assert records[0]["all_pass_corollary"] is True


def test_reports_are_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["scalar-convergence", "--alpha", "0.25", "--steps", "16", "32", "64"]
    assert main(args + ["--out", str(first)]) == EXIT_PASS
    assert main(args + ["--out", str(second)]) == EXIT_PASS
    assert first.read_bytes() == second.read_bytes()


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text(yaml.safe_dump({"ops": {"scalar_convergence_report": {"config": {
        "alphas": [0.5], "steps": [16, 32], "lam_values": [-2.0]}}}}))
    out = tmp_path / "conv.csv"
    assert main(["scalar-convergence", "--config", str(config), "--lam", "-1", "--out", str(out)]) == EXIT_PASS
    df = pd.read_csv(out)
    assert df["alpha"].unique().tolist() == [0.5]
    assert df["lam_re"].unique().tolist() == [-1.0]
    assert df["steps"].tolist() == [16, 32]


def test_flat_config_file(tmp_path):
    config = tmp_path / "flat.yaml"
    config.write_text("alphas: [0.4]\nn_max: 10\n")
    out = tmp_path / "c.csv"
    assert main(["coeff-sweep", "--config", str(config), "--out", str(out)]) == EXIT_PASS
    assert pd.read_csv(out)["n_max"].tolist() == [10]


def test_fixture_mismatch_exits_with_failure(tmp_path):
    out = tmp_path / "t2.csv"
    code = main(["table2", "--alpha", "0.25", "--steps", "5", "--initial-data", "poly", "--spatial", "32",
                 "--tolerance-factor", "1", "--out", str(out)])
    assert code == EXIT_FAIL
    assert len(pd.read_csv(out)) == 1


def test_usage_errors(tmp_path, capsys):
    assert main(["no-such-report"]) == EXIT_USAGE
    assert main(["lemma41-sweep", "--alpha", "0.5", "--epsilon", "0.6"]) == EXIT_USAGE
    assert main(["coeff-sweep", "--lam", "-1"]) == EXIT_USAGE
    assert main(["decay", "--alpha", "1.5"]) == EXIT_USAGE
    assert main(["table1", "--spatial", "1"]) == EXIT_USAGE
    assert main(["coeff-sweep", "--config", str(tmp_path / "missing.yaml")]) == EXIT_USAGE
    assert "does not apply" in capsys.readouterr().err
