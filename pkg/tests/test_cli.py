import csv
import json

import numpy as np
import pytest

from qlga import cli
from qlga import lgastate as L


def read_evolve_csv(path):
    meta, rows = {}, []
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            k, v = line[1:].strip().split("=", 1)
            meta[k] = v
        else:
            body.append(line)
    for r in csv.DictReader(body):
        rows.append((int(r["t"]), int(r["x"]), float(r["p"])))
    return meta, rows


def slices(rows, N):
    T = max(t for t, _, _ in rows)
    P = np.zeros((T + 1, N))
    for t, x, p in rows:
        P[t, x] = p
    return P


class TestAngles:
    @pytest.mark.parametrize("tok,val", [("pi/4", np.pi / 4), ("pi/8", np.pi / 8), ("pi/2", np.pi / 2), ("0.5", 0.5)])
    def test_tokens(self, tok, val):
        assert cli.parse_angle(tok) == pytest.approx(val)

    def test_bad(self):
        assert cli.main(["evolve", "--scatter-angle", "tau/3"]) == 1


class TestEvolve:
    def test_rows_and_normalisation(self, tmp_path):
        out = tmp_path / "ev.csv"
        assert cli.main(["evolve", "--lattice-size", "64", "--scatter-angle", "pi/4", "--steps", "128", "--output", str(out)]) == 0
        meta, rows = read_evolve_csv(out)
        assert meta["N"] == "64" and meta["init"] == "symmetric"
        assert len(rows) == 64 * 129
        P = slices(rows, 64)
        assert np.max(np.abs(P.sum(axis=1) - 1)) <= 1e-8

    def test_classical_full_cycle(self, tmp_path):
        out = tmp_path / "ev.csv"
        args = ["evolve", "--lattice-size", "8", "--scatter-angle", "0", "--steps", "8",
                "--init", "delta", "--x0", "0", "--velocity", "1", "--output", str(out)]
        assert cli.main(args) == 0
        P = slices(read_evolve_csv(out)[1], 8)
        assert P[8, 0] == 1 and P[8, 1:].sum() == 0

    def test_number_format(self, tmp_path):
        out = tmp_path / "ev.csv"
        cli.main(["evolve", "--lattice-size", "4", "--steps", "1", "--output", str(out)])
        text = out.read_text().splitlines()
        assert text[-1] == "1,3,5.00000000000e-01"

    def test_linear_front(self, tmp_path):
        out = tmp_path / "ev.csv"
        cli.main(["evolve", "--lattice-size", "64", "--scatter-angle", "pi/4", "--steps", "28", "--output", str(out)])
        P = slices(read_evolve_csv(out)[1], 64)
        front = np.array([L.leading_front(p, 0) for p in P])
        t = np.arange(len(front))
        slope, icpt = np.polyfit(t, front, 1)
        assert slope > 0.3
        assert np.max(np.abs(front - (slope * t + icpt))) <= 2

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            cli.main(["evolve", "--lattice-size", "16", "--init", "gaussian", "--x0", "8",
                      "--width", "2", "--momentum", "1.5", "--steps", "30", "--output", str(p)])
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path, validate):
        out = tmp_path / "ev.json"
        assert cli.main(["evolve", "--lattice-size", "8", "--steps", "4", "--format", "json", "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        validate(report, "evolve")
        for row in report["rows"]:
            assert abs(sum(float(v) for v in row) - 1) <= 1e-8

    @pytest.mark.parametrize(
        "args",
        [
            ["--lattice-size", "1"],
            ["--steps", "-3"],
            ["--x0", "99", "--lattice-size", "8"],
            ["--init", "gaussian", "--width", "0"],
            ["--init", "teleport"],
            ["--output", "/nonexistent/dir/out.csv"],
        ],
    )
    def test_invalid(self, args, capsys):
        assert cli.main(["evolve", *args]) == 1
        err = capsys.readouterr().err.strip()
        assert len(err.splitlines()) == 1 and err.startswith("qlga: error:")

    def test_stdout(self, capsys):
        assert cli.main(["evolve", "--lattice-size", "2", "--steps", "0"]) == 0
        assert "t,x,p" in capsys.readouterr().out


class TestTimeavg:
    def test_uniform(self, tmp_path, validate):
        out = tmp_path / "ta.json"
        assert cli.main(["timeavg", "--lattice-size", "9", "--init", "uniform", "--steps", "500", "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        validate(report, "timeavg")
        assert all(p["tv"] <= 1e-10 for p in report["points"])

    def test_converges(self, tmp_path, validate):
        out = tmp_path / "ta.json"
        rc = cli.main(["timeavg", "--lattice-size", "17", "--scatter-angle", "pi/4",
                       "--steps", "10000", "--epsilon", "0.05", "--output", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        validate(report, "timeavg")
        assert report["points"][-1]["T"] == 10000
        assert report["points"][-1]["tv"] <= 0.05
        Ts = [p["T"] for p in report["points"]]
        assert Ts[0] == 1 and Ts == sorted(set(Ts))

    def test_check_failure_exit(self, tmp_path):
        out = tmp_path / "ta.json"
        assert cli.main(["timeavg", "--lattice-size", "17", "--steps", "5", "--epsilon", "0.01", "--output", str(out)]) == 2


class TestMixingScan:
    def test_small_scan(self, tmp_path, validate):
        out = tmp_path / "mix.json"
        rc = cli.main(["mixing-scan", "--lattice-sizes", "9,17,33", "--output", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        validate(report, "mixing_scan")
        assert set(report["systems"]) == {"quantum", "classical"}
        text = out.with_suffix(".csv").read_text().splitlines()
        assert text[2] == "system,N,t_mix,t_max,tv"
        assert len(text) == 3 + 6

    def test_config_file(self, tmp_path, validate):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"systems": "classical", "lattice-sizes": [9, 17, 33], "epsilon": 0.1}))
        out = tmp_path / "mix.json"
        assert cli.main(["--config", str(cfg), "mixing-scan", "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        validate(report, "mixing_scan")
        assert report["epsilon"] == 0.1 and list(report["systems"]) == ["classical"]
        # explicit flags win over the file
        assert cli.main(["--config", str(cfg), "mixing-scan", "--epsilon", "0.2", "--output", str(out)]) == 0
        assert json.loads(out.read_text())["epsilon"] == 0.2

    def test_invalid(self):
        assert cli.main(["mixing-scan", "--systems", "bogus"]) == 1
        assert cli.main(["mixing-scan", "--epsilon", "0"]) == 1
        assert cli.main(["mixing-scan", "--lattice-sizes", "9,17"]) == 1

    def test_check_flag_fails_when_cap_too_small(self, tmp_path):
        out = tmp_path / "mix.json"
        rc = cli.main(["mixing-scan", "--systems", "classical", "--lattice-sizes", "9,17,33",
                       "--t-max", "5", "--check", "--output", str(out)])
        assert rc == 2


class TestCircuit:
    def test_verify(self, tmp_path, validate):
        out = tmp_path / "v.json"
        assert cli.main(["circuit", "verify", "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        validate(report, "circuit_verify")
        assert report["max_error"] <= 1e-10 and report["passed"]
        assert {r["n"] for r in report["results"]} == {1, 2, 3, 4, 5}
        assert len(report["results"]) == 20

    def test_verify_modes(self, tmp_path):
        out = tmp_path / "v.json"
        assert cli.main(["circuit", "verify", "--n-max", "3", "--merge-qft", "--explicit-swaps", "--output", str(out)]) == 0

    def test_verify_tolerance_exit(self, tmp_path):
        out = tmp_path / "v.json"
        assert cli.main(["circuit", "verify", "--n-max", "2", "--tolerance", "0", "--output", str(out)]) == 2

    def test_verify_guard(self):
        assert cli.main(["circuit", "verify", "--n-max", "7"]) == 1

    def test_count(self, tmp_path, validate):
        out = tmp_path / "c.json"
        assert cli.main(["circuit", "count", "--output", str(out)]) == 0
        report = json.loads(out.read_text())
        validate(report, "circuit_count")
        assert report["exact_quadratic"]
        assert all(r["residual"] == 0 for r in report["rows"])
        assert report["coefficients"] == {"a": 2.0, "b": 4.0, "c": 1.0}

    def test_count_n1(self, tmp_path):
        out = tmp_path / "c.json"
        assert cli.main(["circuit", "count", "--n-min", "1", "--n-max", "3", "--output", str(out)]) == 0
        row = json.loads(out.read_text())["rows"][0]
        assert row["n"] == 1 and row["total"] == 7
        assert row["counts"] == {"CPHASE": 1, "H": 4, "PHASE": 1, "SCATTER": 1}

    def test_count_explicit_swaps_flags_residuals(self, tmp_path):
        out = tmp_path / "c.json"
        assert cli.main(["circuit", "count", "--explicit-swaps", "--output", str(out)]) == 2


class TestDJ:
    def test_report(self, capsys):
        assert cli.main(["dj"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "f=(0,0): output 0, probability 1.000000"
        assert lines[2] == "f=(1,0): output 1, probability 1.000000"
        assert lines[-1] == "max classical 1-query success = 0.5"

    def test_sampled(self, capsys):
        assert cli.main(["dj", "--shots", "100", "--seed", "3"]) == 0
        assert "sampled 0x0 100x1" in capsys.readouterr().out


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "x.txt"
    cli.write_atomic(target, "hello\n")
    assert target.read_text() == "hello\n"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
