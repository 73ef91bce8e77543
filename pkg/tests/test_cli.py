"""Command-line interface: argument handling, formats, exit codes.

Run in-process through main(argv) so stdout/stderr are capturable and
failures carry Python tracebacks; one subprocess smoke test covers the
installed entry point.
"""

import json
import subprocess
import sys

import pytest

import corrcomm
from corrcomm.cli import main

GOLDEN_BOUNDS = """\
k,rho,global_upper,local_upper,local_lower,naive_risk,max_scheme_risk
4,0,0.18033688,0.18033688,0.18033688,0.25,0.18033688
4,0.5,0.18033688,0.101439495,0.04508422,0.1875,0.13525266
16,0,0.04508422,0.04508422,0.04508422,0.0625,0.04508422
16,0.5,0.04508422,0.0253598738,0.011271055,0.046875,0.033813165
"""

GOLDEN_MAXNORMAL = """\
n,mean,variance,asymptote,ratio
1,0,1,0,nan
2,0.564189584,0.681690114,1.17741002,0.479178513
1024,3.2482396,0.123032926,3.72329741,0.872409384
"""


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_config(tmp_path, **overrides):
    cfg = {
        "scheme": "naive",
        "k_grid": [16],
        "rho_grid": [0.0],
        "trials": 200,
        "seed": 7,
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


# ----------------------------------------------------------------------
# bounds
# ----------------------------------------------------------------------

def test_bounds_golden_csv(capsys):
    # grids arrive unsorted and with duplicates; output is sorted and unique
    code, out, _ = run(capsys, "bounds", "--k", "16,4,16", "--rho", "0.5,0")
    assert code == 0
    assert out == GOLDEN_BOUNDS


def test_bounds_json_document(capsys):
    code, out, _ = run(capsys, "bounds", "--k", "4", "--rho", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"] == {"seed": None, "version": corrcomm.__version__, "schema": 1}
    assert doc["rows"][0]["k"] == 4
    assert doc["rows"][0]["naive_risk"] == pytest.approx(0.25)


def test_bounds_rejects_bad_grids(capsys):
    code, _, err = run(capsys, "bounds", "--k", "4", "--rho", "1.5")
    assert code == 2
    assert "error" in json.loads(err.strip().splitlines()[-1])
    code, _, _ = run(capsys, "bounds", "--k", " , ", "--rho", "0")
    assert code == 2
    code, _, _ = run(capsys, "bounds", "--k", "4.5", "--rho", "0")
    assert code == 2


def test_bounds_out_file(tmp_path, capsys):
    target = tmp_path / "bounds.csv"
    code, out, _ = run(
        capsys, "bounds", "--k", "16,4,16", "--rho", "0.5,0", "--out", str(target)
    )
    assert code == 0
    assert out == ""
    assert target.read_bytes() == GOLDEN_BOUNDS.encode("ascii")


# ----------------------------------------------------------------------
# maxnormal
# ----------------------------------------------------------------------

def test_maxnormal_golden_csv(capsys):
    code, out, _ = run(capsys, "maxnormal", "--n", "1024,2,1")
    assert code == 0
    assert out == GOLDEN_MAXNORMAL


def test_maxnormal_json_turns_nan_into_null(capsys):
    code, out, _ = run(capsys, "maxnormal", "--n", "1", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["ratio"] is None
    assert row["mean"] == 0.0


def test_maxnormal_rejects_bad_pool(capsys):
    code, _, _ = run(capsys, "maxnormal", "--n", "0")
    assert code == 2


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def test_simulate_csv_row(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code, out, err = run(capsys, "simulate", "--config", cfg)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("scheme,k,rho,mse,")
    cells = lines[1].split(",")
    assert cells[0] == "naive"
    assert cells[1] == "16"
    assert abs(float(cells[3]) - 1.0 / 16) < 0.02
    assert "simulate: k=16" in err  # progress goes to stderr only


def test_simulate_runs_are_reproducible(tmp_path, capsys):
    cfg = write_config(tmp_path)
    _, first, _ = run(capsys, "simulate", "--config", cfg)
    _, second, _ = run(capsys, "simulate", "--config", cfg)
    assert first == second


def test_simulate_json_meta_reflects_seed_override(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code, out, _ = run(
        capsys, "simulate", "--config", cfg, "--seed", "99", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["seed"] == 99
    assert doc["rows"][0]["scheme"] == "naive"


def test_simulate_trials_override_rescues_bad_config(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=50)
    code, _, _ = run(capsys, "simulate", "--config", cfg)
    assert code == 2
    code, _, _ = run(capsys, "simulate", "--config", cfg, "--trials", "200")
    assert code == 0


def test_simulate_grid_is_sorted_and_unique(tmp_path, capsys):
    cfg = write_config(tmp_path, k_grid=[32, 16, 32], rho_grid=[0.5, 0.0])
    code, out, _ = run(capsys, "simulate", "--config", cfg)
    assert code == 0
    heads = [tuple(line.split(",")[1:3]) for line in out.splitlines()[1:]]
    assert heads == [("16", "0"), ("16", "0.5"), ("32", "0"), ("32", "0.5")]


@pytest.mark.parametrize(
    "overrides",
    [
        {"scheme": "quantum"},
        {"k_grid": []},
        {"rho_grid": ["abc"]},
        {"trials": "many"},
        {"seed": -1},
        {"format": "xml"},
        {"params": 7},
    ],
)
def test_simulate_config_errors(tmp_path, capsys, overrides):
    cfg = write_config(tmp_path, **overrides)
    code, _, err = run(capsys, "simulate", "--config", cfg)
    assert code == 2
    assert "error" in json.loads(err.strip().splitlines()[-1])


def test_simulate_rejects_cells_before_any_trial(tmp_path, capsys):
    # a missing scheme parameter is caught during the precondition pass
    cfg = write_config(tmp_path, scheme="binary_block", k_grid=[8])
    code, _, err = run(capsys, "simulate", "--config", cfg)
    assert code == 2
    assert "rho_tilde" in err


def test_simulate_missing_config_file(capsys):
    code, _, _ = run(capsys, "simulate", "--config", "/nonexistent.json")
    assert code == 2


def test_simulate_non_object_config(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]")
    code, _, _ = run(capsys, "simulate", "--config", str(path))
    assert code == 2


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def test_verify_single_suites_pass(capsys):
    code, out, _ = run(
        capsys, "verify", "--suite", "shift", "--draws", "5", "--seed", "3"
    )
    assert code == 0
    header, row = out.splitlines()
    assert header == "suite,checks,violations,worst_margin"
    cells = row.split(",")
    assert cells[0] == "shift"
    assert cells[1] == "5"
    assert cells[2] == "0"
    assert float(cells[3]) >= 0.0


def test_verify_gaphamming_counts_the_majority_demo(capsys):
    code, out, _ = run(
        capsys, "verify", "--suite", "gaphamming", "--draws", "2", "--format", "json"
    )
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["suite"] == "gaphamming"
    assert row["checks"] == 3
    assert row["stats"]["majority"]["implied_k_lower"] >= 0.0


def test_verify_zero_draws_warns_and_passes(capsys):
    code, _, err = run(capsys, "verify", "--suite", "tilted", "--draws", "0")
    assert code == 0
    assert "vacuously" in err


def test_verify_negative_draws_rejected(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "tilted", "--draws", "-5")
    assert code == 2


def test_verify_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["verify", "--suite", "unknowable"])
    assert excinfo.value.code == 2


def test_verify_selftest_flags_the_planted_violation(capsys):
    code, out, _ = run(capsys, "verify", "--selftest", "--format", "json")
    assert code == 1
    row = json.loads(out)["rows"][0]
    assert row["suite"] == "selftest"
    assert row["violations"] == 1
    assert row["records"][0]["check"] == "interactive_chain"
    assert row["stats"]["worst_margin"] < 0


def test_verify_replay_round_trip(tmp_path, capsys):
    report = tmp_path / "selftest.json"
    code, _, _ = run(
        capsys, "verify", "--selftest", "--format", "json", "--out", str(report)
    )
    assert code == 1
    code, out, _ = run(capsys, "verify", "--replay", str(report))
    assert code == 1  # the planted record still violates on replay
    row = out.splitlines()[1].split(",")
    assert row[0] == "replay:interactive_chain"
    assert row[2] == "1"


def test_verify_replay_of_clean_report_passes(tmp_path, capsys):
    report = tmp_path / "clean.json"
    code, _, _ = run(
        capsys,
        "verify",
        "--suite",
        "tilted",
        "--draws",
        "5",
        "--format",
        "json",
        "--out",
        str(report),
    )
    assert code == 0
    code, out, _ = run(capsys, "verify", "--replay", str(report))
    assert code == 0
    assert out.splitlines() == ["suite,checks,violations,worst_margin"]


def test_verify_replay_bad_file(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text('{"neither": "rows nor check"}')
    code, _, _ = run(capsys, "verify", "--replay", str(path))
    assert code == 2
    code, _, _ = run(capsys, "verify", "--replay", str(tmp_path / "absent.json"))
    assert code == 2


def test_verify_seed_must_be_u64(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "tilted", "--draws", "1", "--seed", "-3")
    assert code == 2


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == corrcomm.__version__


def test_console_script_smoke():
    proc = subprocess.run(
        ["corrcomm", "bounds", "--k", "4", "--rho", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("4,0,")


def test_module_has_no_other_entry(capsys):
    # the package exposes exactly one executable surface
    proc = subprocess.run(
        [sys.executable, "-c", "from corrcomm.cli import main; raise SystemExit(main(['--version']))"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
