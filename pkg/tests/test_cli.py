"""End-to-end CLI checks through real subprocesses.

Byte comparisons against the committed golden outputs pin the default
scenario and the output formatting at once; everything else checks the
exit-code contract and flag plumbing.
"""

import json
import math
import os
import pathlib
import subprocess
import sys
from dataclasses import replace

import focsim as fs
from focsim.config import default_config
from focsim.constants import constants_fingerprint
from focsim.tables import ResultTable, render

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run_cli(*args, env_extra=None, check=True):
    env = os.environ.copy()
    env.pop("FOCSIM_THREADS", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "focsim.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def test_simulate_matches_golden_bytes():
    proc = run_cli("simulate")
    assert proc.stdout == GOLDEN.joinpath("default_simulate.csv").read_text()


def test_sweep_current_matches_golden_bytes():
    proc = run_cli("sweep-current")
    assert proc.stdout == GOLDEN.joinpath("default_sweep.csv").read_text()
    proc = run_cli("sweep-current", "--format", "json")
    assert proc.stdout == GOLDEN.joinpath("default_sweep.json").read_text()


def test_json_metadata_shape():
    obj = json.loads(run_cli("sweep-current", "--format", "json").stdout)
    assert obj["metadata"]["schema_version"] == "1"
    assert obj["metadata"]["constants_fingerprint"] == constants_fingerprint()
    assert "grid_n" not in obj["metadata"]  # no propagation grid in the ideal chain
    assert obj["columns"][0] == "current_a"
    assert len(obj["rows"]) == 201
    obj2 = json.loads(
        run_cli("sweep-xi", "--ratios", "1", "--segments", "2000",
                "--format", "json").stdout
    )
    assert obj2["metadata"]["grid_n"] == 2000


def test_sweep_xi_bytes_match_the_library_call():
    proc = run_cli("sweep-xi", "--ratios", "1,3", "--profiles", "cosine",
                   "--segments", "20000")
    cfg = default_config()
    medium = replace(
        cfg.medium, profile=replace(cfg.medium.profile, kind="cosine")
    ).build()
    res = fs.run_xi_sweep(medium, (1.0, 3.0), 20000)
    rows = tuple(
        (
            "cosine",
            r.xi_over_delta,
            r.delta_eps_pp_settled,
            r.rms_eps_settled,
            r.mean_eps_settled,
            r.delta_eps_pp_full,
            r.conversion_length_m,
            r.ripple_flagged,
        )
        for r in res.rows
    )
    want = render(
        ResultTable(
            columns=(
                "profile",
                "xi_over_delta",
                "delta_eps_pp_settled",
                "rms_eps_settled",
                "mean_eps_settled",
                "delta_eps_pp_full",
                "conversion_length_m",
                "ripple_flagged",
            ),
            rows=rows,
            grid_n=20000,
        ),
        "csv",
    )
    assert proc.stdout == want


def test_trajectory_stride_and_metric():
    proc = run_cli("trajectory", "--segments", "2000", "--stride", "300")
    lines = proc.stdout.splitlines()
    assert lines[0] == (
        f"# schema=1, constants={constants_fingerprint()}, grid_n=2000, metric=principal"
    )
    assert lines[1] == "z_m,epsilon"
    # stride samples plus the forced final position
    assert len(lines) == 2 + 8
    assert float(lines[-1].split(",")[0]) == 0.3
    proc = run_cli("trajectory", "--segments", "2000", "--stride", "300",
                   "--metric", "axis_ratio")
    assert "metric=axis_ratio" in proc.stdout.splitlines()[0]


def test_converge_emits_ratio_column():
    proc = run_cli("converge", "--counts", "256,512", "--reference-n", "4096")
    lines = proc.stdout.splitlines()
    assert lines[1] == "n_segments,max_abs_dev,ratio"
    first = lines[2].split(",")
    last = lines[3].split(",")
    assert first[0] == "256" and last[0] == "512"
    assert float(first[2]) > 0.0
    assert last[2] == ""  # no ratio below the last rung


def test_bad_config_exits_2_with_the_key_path(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"medium": {"profile": {"bogus": 1}}}')
    proc = run_cli("simulate", "--config", str(p), check=False)
    assert proc.returncode == 2
    assert "config error" in proc.stderr
    assert "medium.profile.bogus" in proc.stderr
    assert proc.stdout == ""


def test_fringe_null_exits_3_naming_the_current():
    null_current = (math.pi / 4) / (1e-6 * 355)
    proc = run_cli(
        "simulate", "--current-a", format(null_current, ".17g"), check=False
    )
    assert proc.returncode == 3
    assert "current_a" in proc.stderr
    assert proc.stdout == ""


def test_unwritable_output_exits_4(tmp_path):
    proc = run_cli(
        "simulate", "--out", str(tmp_path / "no-such-dir" / "x.csv"), check=False
    )
    assert proc.returncode == 4
    assert "cannot write" in proc.stderr


def test_print_config_is_a_fixed_point(tmp_path):
    first = run_cli("print-config").stdout
    p = tmp_path / "echo.json"
    p.write_text(first)
    again = run_cli("print-config", "--config", str(p)).stdout
    assert again == first
    obj = json.loads(first)
    assert obj["schema_version"] == "1"
    assert "constants" in obj


def test_stdout_is_deterministic_and_timing_goes_to_stderr():
    a = run_cli("sweep-current", "--points", "41")
    b = run_cli("sweep-current", "--points", "41")
    assert a.stdout == b.stdout
    assert "finished in" in a.stderr
    assert "finished in" not in a.stdout
    c = run_cli("sweep-current", "--points", "41", env_extra={"FOCSIM_THREADS": "2"})
    assert c.stdout == a.stdout
    d = run_cli("sweep-current", "--points", "41", "--seedless")
    assert d.stdout == a.stdout


def test_out_file_matches_stdout_bytes(tmp_path):
    p = tmp_path / "t.csv"
    run_cli("simulate", "--out", str(p))
    assert p.read_text() == run_cli("simulate").stdout
