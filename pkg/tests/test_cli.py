import json
import resource
import subprocess
import sys

import jsonschema
import pytest

from practical_bounds import bounds as bounds_mod
from practical_bounds.bounds import report_schema
from practical_bounds.cli import main, parse_bytes
from practical_bounds.config import RunConfig, estimate_memory
from practical_bounds.errors import ConfigError, ConsistencyError
from practical_bounds.practical import load_rows


def run(capsys, *argv):
    code = main(["--log-level", "WARNING", *argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_n_max_zero_is_usage_error(capsys):
    code, _, err = run(capsys, "bounds", "--n-max", "0")
    assert code == 2
    assert err.startswith("usage:")
    assert "practical_bounds.config" in err


def test_missing_n_max(capsys):
    code, _, err = run(capsys, "bounds")
    assert code == 2 and "--n-max is required" in err


def test_bounds_n1_text(capsys):
    code, out, _ = run(capsys, "bounds", "--n-max", "1", "--j", "2", "--format", "text")
    assert code == 0
    assert "c ∈ [" in out


def test_bounds_json_validates(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "bounds", "--n-max", "4096", "--format", "json", "--out", str(dest))
    assert code == 0 and out == ""
    jsonschema.validate(json.loads(dest.read_text()), report_schema())


def test_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PRACTICAL_BOUNDS_N_MAX", "1")
    monkeypatch.setenv("PRACTICAL_BOUNDS_FORMAT", "csv")
    code, out, _ = run(capsys, "bounds", "--j", "2")
    assert code == 0 and out.startswith("N,J,")
    code, out, _ = run(capsys, "bounds", "--j", "2", "--format", "json")
    assert code == 0 and json.loads(out)["N"] == 1


@pytest.mark.parametrize(
    "flags",
    [["--k0", "23"], ["--k0", "39"], ["--j", "1"], ["--mem-budget", "1M"], ["--threads", "0"]],
)
def test_config_errors(capsys, flags):
    code, _, _ = run(capsys, "bounds", "--n-max", "100", *flags)
    assert code == 2


def test_consistency_error_exit_3(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise ConsistencyError("inverted alpha bounds")

    monkeypatch.setattr(bounds_mod, "assemble", broken)
    code, _, err = run(capsys, "bounds", "--n-max", "64")
    assert code == 3
    assert "practical_bounds.bounds" in err


def test_checkpoint_reuse(capsys, tmp_path):
    args = ["bounds", "--n-max", "5000", "--format", "json", "--checkpoint", str(tmp_path)]
    code, first, _ = run(capsys, *args)
    assert code == 0
    assert (tmp_path / "augmented_N5000_J13.bin").exists()
    code, second, _ = run(capsys, *args)
    assert code == 0 and first == second


def test_table_n30(capsys, tmp_path):
    out = tmp_path / "rows.csv"
    assert run(capsys, "table", "--n-max", "30", "--out", str(out))[0] == 0
    assert load_rows(out).n.tolist() == [1, 2, 4, 6, 8, 12, 16, 18, 20, 24, 28, 30]
    before = out.read_bytes()
    assert run(capsys, "table", "--n-max", "30", "--out", str(out))[0] == 0
    assert out.read_bytes() == before


def test_table_formats_agree(capsys, tmp_path):
    assert run(capsys, "table", "--n-max", "3000", "--checkpoint", str(tmp_path))[0] == 0
    assert run(capsys, "table", "--n-max", "3000", "--checkpoint", str(tmp_path), "--format", "binary")[0] == 0
    a = load_rows(tmp_path / "rows_N3000.csv", "csv")
    b = load_rows(tmp_path / "rows_N3000.bin", "binary")
    assert list(a) == list(b)


def test_table_augmented(capsys, tmp_path):
    out = tmp_path / "rows.csv"
    assert run(capsys, "table", "--n-max", "500", "--out", str(out), "--augmented")[0] == 0
    assert (tmp_path / "rows_aug_J13.csv").exists()


def test_table_needs_destination(capsys):
    assert run(capsys, "table", "--n-max", "30")[0] == 2


def test_io_failure_exit_4(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "table", "--n-max", "30", "--out", str(blocker / "rows.csv"))
    assert code == 4 and "I/O failure" in err


def test_selftest_fast(capsys):
    code, _, err = run(capsys, "selftest", "fast")
    assert code == 0
    assert "FAIL" not in err


def test_parse_bytes():
    assert parse_bytes("512M") == 512 << 20
    assert parse_bytes("2GiB") == 2 << 30
    assert parse_bytes("1000") == 1000


def test_run_config_validation():
    assert RunConfig(n_max=10).validate().j_order == 13
    with pytest.raises(ConfigError):
        RunConfig(n_max=2**22, mem_budget_bytes=estimate_memory(2**22) - 1).validate()


@pytest.mark.slow
def test_memory_guard_honoured_at_2_22():
    budget = estimate_memory(2**22)
    proc = subprocess.run(
        [sys.executable, "-m", "practical_bounds", "--log-level", "WARNING", "bounds",
         "--n-max", str(2**22), "--format", "json", "--mem-budget", str(budget)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    # max over all children so far; this is the only subprocess in the suite
    peak = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss * 1024
    assert peak <= 1.25 * budget
