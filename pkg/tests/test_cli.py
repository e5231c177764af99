import json
import math
import subprocess
import sys

import pytest

from qwmc import artifacts, cli
from qwmc.seeding import derive_seed


def run_ok(*argv):
    code = cli.run([str(a) for a in argv])
    assert code == 0
    return code


class TestArtifacts:

    def test_float_format(self):
        assert artifacts.format_float(0.1) == "0.10000000000000001"
        assert artifacts.format_float(math.inf) == "inf"
        assert artifacts.format_float(1.0) == "1"

    def test_csv(self):
        text = artifacts.render_csv(("a", "b"), [(1, 0.5), {"a": "x", "b": 2.0}])
        assert text == "a,b\n1,0.5\nx,2\n"

    def test_json_sorted(self):
        text = artifacts.render_json({"b": 1, "a": [0.25, math.inf], "c": {"z": None, "y": True}})
        assert text.index('"a"') < text.index('"b"') < text.index('"c"')
        assert json.loads(text)["a"] == [0.25, "inf"]
        assert json.loads(text)["c"] == {"y": True, "z": None}

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            artifacts.emit_csv(("a",), [], tmp_path / "missing" / "x.csv")

    def test_read_distribution(self, tmp_path):
        path = artifacts.emit_csv(artifacts.DIST_HEADER, [("survived", 1.0, 0.5)], tmp_path / "d.csv")
        assert artifacts.read_distribution_csv(path) == (["survived"], [0.5])
        assert artifacts.read_distribution_csv(path, "exact_probability") == (["survived"], [1.0])


class TestSeeding:

    def test_stable(self):
        assert derive_seed(0, "walk") == derive_seed(0, "walk")

    def test_distinct(self):
        seeds = {derive_seed(0, "a"), derive_seed(0, "b"), derive_seed(1, "a"),
                 derive_seed(0, "table1", 15), derive_seed(0, "table1", 31)}
        assert len(seeds) == 5


class TestSubcommands:

    def test_physics(self, tmp_path):
        out = tmp_path / "phys.csv"
        run_ok("physics", "--steps", 3, "--out", out)
        lines = out.read_text().splitlines()
        assert lines[0] == "step,depth_cm,p_k,cumulative_survival"
        assert len(lines) == 4
        assert float(lines[1].split(",")[2]) == pytest.approx(0.0169002147202)

    def test_physics_stdout(self, capsys):
        run_ok("physics", "--steps", 2)
        assert capsys.readouterr().out.startswith("step,depth_cm")

    def test_walk(self, tmp_path, capsys):
        out = tmp_path / "dist.csv"
        run_ok("walk", "--steps", 4, "--shots", 1000, "--out", out)
        lines = out.read_text().splitlines()
        assert lines[0] == "outcome_label,exact_probability,sampled_frequency"
        assert [l.split(",")[0] for l in lines[1:]] == \
            ["absorbed@0", "absorbed@1", "absorbed@2", "absorbed@3", "survived"]
        assert capsys.readouterr().out.count("\n") == 1

    def test_walk_zero_steps(self, capsys):
        assert cli.run(["walk", "--steps", "0"]) != 0
        assert "steps" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert cli.run(["walk", "--bogus"]) != 0

    def test_unknown_command(self):
        assert cli.run(["fly"]) != 0

    def test_bad_epsilon(self, tmp_path, capsys):
        assert cli.run(["iqae", "--epsilon", "0.7", "--out", str(tmp_path / "i.json")]) != 0
        assert "epsilon" in capsys.readouterr().err

    def test_unwritable(self, tmp_path, capsys):
        assert cli.run(["mc", "--shots", "10", "--out", str(tmp_path / "no" / "m.csv")]) != 0
        assert "cannot write" in capsys.readouterr().err

    def test_iqae(self, tmp_path):
        out = tmp_path / "iqae.json"
        run_ok("iqae", "--steps", 15, "--threshold", 15, "--seed", 3, "--out", out)
        data = json.loads(out.read_text())
        assert abs(data["estimate"] - data["exact_amplitude"]) <= 0.02
        assert data["oracle_queries"] == sum(r["shots"] * (2 * r["k"] + 1) for r in data["rounds"])
        assert data["query_bound"] == 3097

    def test_compare(self, tmp_path):
        a, b, rep = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "r.json"
        run_ok("walk", "--steps", 3, "--shots", 5000, "--out", a)
        run_ok("mc", "--steps", 3, "--shots", 5000, "--out", b)
        run_ok("compare", "--a", a, "--b", b, "--out", rep)
        data = json.loads(rep.read_text())
        assert set(data) == {"mse", "kl_divergence", "kl_reverse", "bins"}
        assert len(data["bins"]) == 4

    def test_compare_mismatch(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_ok("walk", "--steps", 3, "--shots", 100, "--out", a)
        run_ok("mc", "--steps", 4, "--shots", 100, "--out", b)
        assert cli.run(["compare", "--a", str(a), "--b", str(b), "--out",
                        str(tmp_path / "r.json")]) != 0

    def test_scaling(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        run_ok("scaling", "--epsilons", "0.05,0.02,0.01", "--reps", 3, "--classical-reps", 3,
               "--out", out)
        lines = out.read_text().splitlines()
        assert lines[0] == "method,epsilon,seed,oracle_queries,abs_error"
        assert len(lines) == 1 + 9 + 9
        assert "iqae slope=" in capsys.readouterr().out


class TestConfigFile:

    def test_config_values(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# walk run\nsteps = 5\nshots=200\n")
        out = tmp_path / "d.csv"
        run_ok("walk", "--config", cfg, "--out", out)
        assert len(out.read_text().splitlines()) == 1 + 6

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("steps = 5\nshots_per_round = 40\n")
        out = tmp_path / "i.json"
        run_ok("iqae", "--config", cfg, "--steps", 3, "--out", out)
        data = json.loads(out.read_text())
        assert data["steps"] == 3
        assert data["shots_per_round"] == 40

    def test_malformed(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("steps 5\n")
        assert cli.run(["walk", "--config", str(cfg)]) != 0
        assert "key = value" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.run(["walk", "--config", str(tmp_path / "none.cfg")]) != 0


class TestDeterminism:

    @pytest.mark.parametrize("argv", [
        ["walk", "--steps", "15", "--shots", "20000", "--seed", "4"],
        ["mc", "--steps", "15", "--shots", "20000", "--seed", "4"],
        ["iqae", "--seed", "4"],
        ["scaling", "--epsilons", "0.05,0.02,0.01", "--reps", "2", "--seed", "4"],
        ["physics", "--steps", "31"],
    ])
    def test_byte_identical(self, tmp_path, argv):
        outs = []
        for i in range(2):
            path = tmp_path / f"out{i}"
            run_ok(*argv, "--out", path)
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_ok("walk", "--shots", 1000, "--seed", 1, "--out", a)
        run_ok("walk", "--shots", 1000, "--seed", 2, "--out", b)
        assert a.read_bytes() != b.read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path, monkeypatch):
        argv = ["scaling", "--epsilons", "0.05,0.02,0.01", "--reps", "4"]
        run_ok(*argv, "--out", tmp_path / "serial.csv")
        monkeypatch.setenv("QWMC_THREADS", "4")
        run_ok(*argv, "--out", tmp_path / "threaded.csv")
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "threaded.csv").read_bytes()


class TestRepro:

    def test_table1(self, tmp_path, capsys):
        run_ok("repro", "--table1", "--out-dir", tmp_path)
        data = json.loads((tmp_path / "table1.json").read_text())
        assert [r["steps"] for r in data["rows"]] == [15, 31]
        assert (tmp_path / "table1.csv").read_text().startswith("steps,mse,kl_divergence")
        assert "table1:" in capsys.readouterr().out

    def test_fig5(self, tmp_path):
        run_ok("repro", "--fig5", "--out-dir", tmp_path)
        slopes = json.loads((tmp_path / "slopes.json").read_text())["slopes"]
        assert set(slopes) == {"iqae", "classical"}
        assert (tmp_path / "scaling.csv").exists()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qwmc.cli", "physics", "--steps", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "step,depth_cm,p_k,cumulative_survival"
