"""End-to-end checks of the fracfund executable."""
import json
import os
import pathlib
import subprocess
import sys

import pytest

BIN = os.environ.get("FRACFUND_BIN", "build/tools/fracfund")
SOURCE = pathlib.Path(os.environ.get("FRACFUND_SOURCE", pathlib.Path(__file__).parents[2]))
SCHEMAS = SOURCE / "schemas"

SMALL_SOLVE = """
[kernel]
family = modulated
s = 0.5
lambda = 1
Lambda = 2
[potential]
kind = constant
value = 1
[grid]
n = 2
N_side = 25
[rhs]
kind = mollifier
l = 2
"""

SMALL_FUNDAMENTAL = """
[kernel]
s = 0.5
[potential]
kind = {kind}
value = {value}
[grid]
n = 2
[schedule]
radii = 1, 2
scales = 2
min_N_side = 33
[fit]
r_min = 0.5
r_max = 0.9
[diagnostics]
radii = 0.25, 0.5
"""

SMALL_VERIFY = """
[verify]
samples = {samples}
N_side = 17
fixture = {fixture}
[run]
seed = 42
"""


def run(args, cwd, env=None):
    full_env = dict(os.environ)
    full_env.pop("FRACFUND_OUT_DIR", None)
    full_env.update(env or {})
    return subprocess.run([BIN, *args], cwd=cwd, env=full_env, capture_output=True, text=True)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def load(path):
    return json.loads(pathlib.Path(path).read_text(encoding="utf-8"))


def without_metadata(path):
    doc = load(path)
    doc.pop("metadata")
    return doc


def validate(*reports):
    done = subprocess.run(
        [sys.executable, str(SOURCE / "tests" / "cli" / "validate_schema.py"), str(SCHEMAS), *map(str, reports)],
        capture_output=True,
        text=True,
    )
    assert done.returncode == 0, done.stderr


def test_solve_happy_path(tmp_path):
    cfg = write(tmp_path, "solve.ini", SMALL_SOLVE)
    out = tmp_path / "out"
    done = run(["solve", "--config", cfg, "--out", str(out)], tmp_path)
    assert done.returncode == 0, done.stderr
    report = load(out / "solve_report.json")
    assert report["status"] == "converged"
    assert report["final_residual"] <= 1e-10
    assert report["grid"]["storage"] == "dense"
    assert report["norms"]["gagliardo_norm"] > 0
    assert report["residual_history"][0] == 1.0
    lines = (out / "solution.csv").read_text().splitlines()
    assert len(lines) == report["grid"]["active_nodes"] + 1
    validate(out / "solve_report.json")


def test_invalid_order_exits_1(tmp_path):
    cfg = write(tmp_path, "bad.ini", "[kernel]\ns = 1.2\n")
    done = run(["solve", "--config", cfg, "--out", str(tmp_path / "out")], tmp_path)
    assert done.returncode == 1
    assert "s in (0,1)" in done.stderr


def test_missing_config_exits_1(tmp_path):
    assert run(["solve"], tmp_path).returncode == 1
    assert run(["solve", "--config", str(tmp_path / "absent.ini")], tmp_path).returncode == 1


def test_nonconvergence_exits_2_with_history(tmp_path):
    cfg = write(tmp_path, "slow.ini", SMALL_SOLVE + "[solver]\nmax_iterations = 1\n")
    out = tmp_path / "out"
    done = run(["solve", "--config", cfg, "--out", str(out)], tmp_path)
    assert done.returncode == 2
    history = (out / "residual_history.csv").read_text().splitlines()
    assert len(history) == 3
    report = load(out / "solve_report.json")
    assert report["status"] == "failed"
    validate(out / "solve_report.json")


def test_resolution_violation_exits_1(tmp_path):
    cfg = write(tmp_path, "coarse.ini", SMALL_SOLVE.replace("l = 2", "l = 8"))
    done = run(["solve", "--config", cfg, "--out", str(tmp_path / "out")], tmp_path)
    assert done.returncode == 1
    assert "1/(4l)" in done.stderr
    sched = write(tmp_path, "sched.ini", "[schedule]\nradii = 2, 4\nscales = 4, 8\nN_side = 129, 129\n")
    done = run(["fundamental", "--config", sched, "--out", str(tmp_path / "out2")], tmp_path)
    assert done.returncode == 1
    assert "resolution rule" in done.stderr


def test_unknown_suite_exits_1(tmp_path):
    cfg = write(tmp_path, "v.ini", SMALL_VERIFY.format(samples=5, fixture="none"))
    done = run(["verify", "nonsense", "--config", cfg, "--out", str(tmp_path / "out")], tmp_path)
    assert done.returncode == 1
    assert "maxprinciple" in done.stderr


def test_verify_is_reproducible(tmp_path):
    cfg = write(tmp_path, "v.ini", SMALL_VERIFY.format(samples=10, fixture="none"))
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["verify", "maxprinciple", "--config", cfg, "--out", str(a)], tmp_path).returncode == 0
    assert run(["verify", "maxprinciple", "--config", cfg, "--out", str(b)], tmp_path).returncode == 0
    assert without_metadata(a / "verify_summary.json") == without_metadata(b / "verify_summary.json")
    assert (a / "verify_summary.xml").exists()
    validate(a / "verify_summary.json")


def test_seed_override(tmp_path):
    cfg = write(tmp_path, "v.ini", SMALL_VERIFY.format(samples=10, fixture="none"))
    out = tmp_path / "out"
    assert run(["verify", "maxprinciple", "--config", cfg, "--out", str(out), "--seed", "7"], tmp_path).returncode == 0
    assert load(out / "verify_summary.json")["seed"] == 7


def test_reversed_comparison_fails_with_anchor(tmp_path):
    cfg = write(tmp_path, "v.ini", SMALL_VERIFY.format(samples=10, fixture="negate_order"))
    done = run(["verify", "comparison", "--config", cfg, "--out", str(tmp_path / "out")], tmp_path)
    assert done.returncode == 2
    assert "comparison principle" in done.stderr
    assert "FAIL" in done.stdout


def test_out_dir_from_environment(tmp_path):
    cfg = write(tmp_path, "solve.ini", SMALL_SOLVE)
    target = tmp_path / "from_env"
    done = run(["solve", "--config", cfg], tmp_path, env={"FRACFUND_OUT_DIR": str(target)})
    assert done.returncode == 0, done.stderr
    assert (target / "solve_report.json").exists()
    flag = tmp_path / "from_flag"
    done = run(["solve", "--config", cfg, "--out", str(flag)], tmp_path, env={"FRACFUND_OUT_DIR": str(target)})
    assert done.returncode == 0
    assert (flag / "solve_report.json").exists()


@pytest.fixture(scope="module")
def fundamental_pair(tmp_path_factory):
    root = tmp_path_factory.mktemp("fundamental")
    outs = {}
    for kind, value in (("zero", 0), ("constant", 1)):
        cfg = write(root, f"{kind}.ini", SMALL_FUNDAMENTAL.format(kind=kind, value=value))
        out = root / kind
        done = run(["fundamental", "--config", cfg, "--out", str(out)], root)
        assert done.returncode == 0, done.stderr
        outs[kind] = out
    return outs


def test_fundamental_outputs(fundamental_pair):
    for out in fundamental_pair.values():
        for name in ("fundamental_report.json", "radial_profile.csv", "lemma58_diagnostics.csv"):
            assert (out / name).exists()
        validate(out / "fundamental_report.json")


def test_potential_changes_fields_not_grids(fundamental_pair):
    v0 = load(fundamental_pair["zero"] / "fundamental_report.json")
    v1 = load(fundamental_pair["constant"] / "fundamental_report.json")
    assert v0["schedule"] == v1["schedule"]
    assert [s["max_value"] for s in v0["stages"]] != [s["max_value"] for s in v1["stages"]]
    for a, b in zip(v0["stages"], v1["stages"]):
        assert b["max_value"] <= a["max_value"]


def test_stage_failure_writes_partial_report(tmp_path):
    cfg = write(tmp_path, "f.ini", SMALL_FUNDAMENTAL.format(kind="zero", value=0) + "[solver]\nmax_iterations = 1\n")
    out = tmp_path / "out"
    done = run(["fundamental", "--config", cfg, "--out", str(out)], tmp_path)
    assert done.returncode == 2
    report = load(out / "fundamental_report.json")
    assert report["status"] == "failed"
    assert report["failed_stage"]["index"] == 1
    validate(out / "fundamental_report.json")
