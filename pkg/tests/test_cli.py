"""End-to-end tests of the command-line front end: exit codes, seed echoing,
byte-level reproducibility, and the CSV/JSON emissions of each subcommand."""
import csv
import json

import numpy as np
import pytest

from fpl import numerics
from fpl.cli import main


def run(tmp_path, *argv, name="out"):
    path = tmp_path / name
    code = main([*argv, "--out", str(path)])
    return code, path


class TestDist:
    def test_fixture_distribution_csv(self, tmp_path):
        code, path = run(tmp_path, "dist", "--fixture", "U5t",
                         "--input", "10101", "--regime", "quantum")
        assert code == 0
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 35
        total = sum(float(r["probability"]) for r in rows)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_pipe_and_digit_inputs_agree(self, tmp_path):
        _, p1 = run(tmp_path, "dist", "--fixture", "U5t", "--input", "10101",
                    name="a.csv")
        _, p2 = run(tmp_path, "dist", "--fixture", "U5t",
                    "--input", "1|0|1|0|1", name="b.csv")
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_occupation_string_exit_2(self, tmp_path):
        code, _ = run(tmp_path, "dist", "--fixture", "U5t", "--input", "abc")
        assert code == 2

    def test_plot_file_rendered(self, tmp_path):
        png = tmp_path / "dist.png"
        code, _ = run(tmp_path, "dist", "--fixture", "U5t", "--input", "10101",
                      "--plot", str(png))
        assert code == 0 and png.stat().st_size > 0


class TestHaar:
    def test_byte_identical_reruns(self, tmp_path):
        _, p1 = run(tmp_path, "haar", "--modes", "5", "--seed", "7", name="a")
        _, p2 = run(tmp_path, "haar", "--modes", "5", "--seed", "7", name="b")
        assert p1.read_bytes() == p2.read_bytes()

    def test_seed_echoed_and_unitary(self, tmp_path):
        _, path = run(tmp_path, "haar", "--modes", "4", "--seed", "11")
        obj = json.loads(path.read_text())
        assert obj["seed"] == 11
        U = numerics.matrix_from_json(obj["unitary"])
        assert numerics.is_unitary(U, tol=1e-9)


class TestReckAndChip:
    def test_reck_round_trip(self, tmp_path):
        from fpl.interferometer import compose_unitary, interferometer_from_json
        _, hp = run(tmp_path, "haar", "--modes", "6", "--seed", "3", name="h")
        code, rp = run(tmp_path, "reck", "--in", str(hp), name="r")
        assert code == 0
        chip = interferometer_from_json(json.loads(rp.read_text())["interferometer"])
        U = numerics.matrix_from_json(json.loads(hp.read_text())["unitary"])
        assert np.max(np.abs(compose_unitary(chip) - U)) <= 1e-9

    def test_chip_phase_table(self, tmp_path):
        from fpl.interferometer import load_fixture
        _, path = run(tmp_path, "chip", "--phase-table", "Parameters7")
        U = numerics.matrix_from_json(json.loads(path.read_text())["unitary"])
        assert numerics.max_gate_fidelity(U, load_fixture("U7t")) >= 0.97

    def test_chip_random_reproducible(self, tmp_path):
        _, p1 = run(tmp_path, "chip", "--modes", "5", "--layers", "4",
                    "--seed", "2", name="a")
        _, p2 = run(tmp_path, "chip", "--modes", "5", "--layers", "4",
                    "--seed", "2", name="b")
        assert p1.read_bytes() == p2.read_bytes()


class TestSampling:
    def test_sample_seed_header_and_states(self, tmp_path):
        code, path = run(tmp_path, "sample", "--fixture", "U5t",
                         "--input", "10101", "-N", "20", "--seed", "9")
        assert code == 0
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# seed=9"
        assert len(lines) == 21
        assert all(sum(int(x) for x in ln.split("|")) == 3 for ln in lines[1:])

    def test_depth3_runs(self, tmp_path):
        code, path = run(tmp_path, "depth3", "--modes", "6", "--photons", "3",
                         "-N", "50", "--seed", "4")
        assert code == 0
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 51


class TestBunching:
    def test_json_fields(self, tmp_path):
        code, path = run(tmp_path, "bunching", "--modes", "5", "--photons", "3",
                         "--seed", "1")
        assert code == 0
        obj = json.loads(path.read_text())
        assert obj["full_bunching_ratio"] == pytest.approx(6.0)
        assert 0.0 <= obj["bunching_fraction_classical"] <= 1.0
        assert obj["birthday"][0]["n"] == 2


class TestTomo:
    def test_reconstruction_pipeline(self, tmp_path):
        from fpl.boson import simulate_experiment
        from fpl.tomography import dataset_to_files
        rng = numerics.random_source(5)
        U = numerics.haar_unitary(4, rng)
        dataset_to_files(simulate_experiment(U, 10**4, rng), tmp_path / "data")
        code, path = run(tmp_path, "tomo", "--data", str(tmp_path / "data"),
                         "--refine", "20", "--seed", "5")
        assert code == 0
        obj = json.loads(path.read_text())
        V = numerics.matrix_from_json(obj["result"]["U"])
        assert numerics.max_gate_fidelity(U, V) >= 0.99

    def test_missing_dataset_exit_2(self, tmp_path):
        code, _ = run(tmp_path, "tomo", "--data", str(tmp_path / "nope"))
        assert code == 2


class TestValidate:
    def test_aa_csv(self, tmp_path):
        code, path = run(tmp_path, "validate", "aa", "--modes", "9",
                         "--photons", "3", "--nset", "500", "--trials", "10",
                         "--seed", "100")
        assert code == 0
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# seed=100"
        assert lines[1] == "source,N_set,success_rate,trials"
        rows = list(csv.DictReader(lines[1:]))
        assert {r["source"] for r in rows} == {"quantum", "uniform"}
        assert all(float(r["success_rate"]) >= 0.9 for r in rows)

    def test_likelihood_csv(self, tmp_path):
        code, path = run(tmp_path, "validate", "likelihood", "--modes", "6",
                         "--photons", "2", "--nset", "100", "--trials", "5",
                         "--seed", "6")
        assert code == 0
        rows = list(csv.DictReader(path.read_text().splitlines()[1:]))
        assert {r["source"] for r in rows} == {"indistinguishable",
                                               "distinguishable"}


class TestFixturesAndEnsemble:
    def test_fixtures_all(self, tmp_path):
        code, path = run(tmp_path, "fixtures")
        assert code == 0
        obj = json.loads(path.read_text())
        assert set(obj) == {"U5t", "U5r", "U7t", "U7r", "U9t"}

    def test_ensemble_sim_csv(self, tmp_path):
        code, path = run(tmp_path, "ensemble-sim", "--modes", "7",
                         "--layers", "7", "-N", "10", "--seed", "4")
        assert code == 0
        rows = list(csv.DictReader(path.read_text().splitlines()[1:]))
        assert len(rows) == 20
        assert all(0.0 <= float(r["central_output_prob"]) <= 1.0 for r in rows)


class TestGuards:
    def test_unknown_command_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_thread_cap_exit_2(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FPL_THREADS", "0")
        code, _ = run(tmp_path, "haar", "--modes", "3", "--seed", "1")
        assert code == 2

    def test_capacity_error_exit_3(self, tmp_path):
        code, _ = run(tmp_path, "dist", "--fixture", "U9t",
                      "--input", "40|40|40|0|0|0|0|0|0")
        assert code == 3
