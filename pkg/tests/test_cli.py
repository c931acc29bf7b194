import csv
import io
import json

import pytest

from mertens_dissect import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_table(capsys):
    code, out, _ = run_cli(capsys, ["constants", "--digits", "20"])
    assert code == 0
    assert "beta" in out and "0.26149721284764278376" in out
    assert "gamma" in out and "0.57721566490153286061" in out


def test_constants_json_schema(capsys):
    code, out, _ = run_cli(capsys, ["constants", "--digits", "20", "--output", "json"])
    data = json.loads(out)
    assert data["schema"] == "mertens-dissect/1"
    assert data["command"] == "constants"
    for row in data["rows"]:
        assert isinstance(row["value"], str)  # decimal strings, never floats


def test_json_round_trip_identity(capsys):
    _, out1, _ = run_cli(capsys, ["coefficients", "--K", "8", "--output", "json"])
    _, out2, _ = run_cli(capsys, ["coefficients", "--K", "8", "--output", "json"])
    assert out1 == out2  # byte-identical repeat runs
    data = json.loads(out1)
    assert json.loads(json.dumps(data)) == data


def test_coefficients_csv(capsys):
    code, out, _ = run_cli(capsys, ["coefficients", "--K", "5", "--output", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert rows[0]["c_k"] == "1.0"
    assert rows[2]["c_k"].startswith("0.22612371")


def test_coefficients_sources_agree(capsys):
    _, a, _ = run_cli(capsys, ["coefficients", "--K", "6", "--source", "recursion",
                               "--output", "csv"])
    _, b, _ = run_cli(capsys, ["coefficients", "--K", "6", "--source", "partition",
                               "--output", "csv"])
    assert a == b


def test_dissect_exact_routes(capsys):
    code, out, _ = run_cli(capsys, ["dissect", "--k", "2", "--x", "10", "--exact",
                                    "--output", "json"])
    assert code == 0
    data = json.loads(out)
    values = {row["route"]: row["value"] for row in data["rows"]}
    assert values == {"newton": "39799/44100", "partition": "39799/44100",
                      "brute": "39799/44100"}


def test_expansion_output(capsys):
    code, out, _ = run_cli(capsys, ["expansion", "--q", "3", "--kmax", "10",
                                    "--digits", "30", "--output", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["k"] == "alpha_2"
    assert rows[0]["value"].startswith("0.712064231")


def test_resum_command(capsys):
    code, out, _ = run_cli(capsys, ["resum", "--x", "1000", "--output", "json"])
    assert code == 0
    data = json.loads(out)
    gap = next(r["value"] for r in data["rows"] if r["quantity"] == "resum_gap")
    assert abs(float(gap)) < 1e-10


def test_contour_command(capsys):
    code, out, _ = run_cli(capsys, ["contour", "--k", "2", "--x", "10", "--r", "0.5",
                                    "--digits", "25", "--output", "json"])
    assert code == 0
    data = json.loads(out)
    value = next(r["value"] for r in data["rows"] if r["quantity"] == "value")
    assert value.startswith("0.9024716553")


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["dissect", "--k", "2"])  # missing required --x
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus-command"])
    assert exc.value.code == 2


def test_domain_error_exit_2(capsys):
    code, _, err = run_cli(capsys, ["dissect", "--k", "-1", "--x", "10"])
    assert code == 2
    assert "error" in err


def test_resource_guard_exit_3(capsys):
    code, _, err = run_cli(capsys, ["dissect", "--k", "2", "--x", str(2 * 10**8)])
    assert code == 3
    assert "resource" in err


def test_prime_cache_flag(tmp_path, capsys):
    cache = str(tmp_path / "primes.bin")
    code, out1, _ = run_cli(capsys, ["dissect", "--k", "2", "--x", "100",
                                     "--cache", cache, "--output", "csv"])
    assert code == 0
    assert (tmp_path / "primes.bin").exists()
    code, out2, _ = run_cli(capsys, ["dissect", "--k", "2", "--x", "100",
                                     "--cache", cache, "--output", "csv"])
    assert code == 0
    assert out1 == out2


def test_verify_seed_and_check(tmp_path, capsys):
    fixture = str(tmp_path / "envelopes.json")
    code, out, _ = run_cli(capsys, ["verify", "--seed-regression", "--fixture", fixture,
                                    "--digits", "30"])
    assert code == 0
    seeded = json.loads(open(fixture).read())
    assert seeded["schema"] == "mertens-dissect/1"
    assert len(seeded["envelopes"]) >= 5
    code, out, _ = run_cli(capsys, ["verify", "--fixture", fixture, "--digits", "30"])
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 10


def test_verify_bundled_fixture(capsys):
    code, out, _ = run_cli(capsys, ["verify", "--digits", "50"])
    assert code == 0
    assert "FAIL" not in out
