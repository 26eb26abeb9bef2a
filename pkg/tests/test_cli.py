import json

import pytest

from vqe_bench.cli import main

from conftest import H2, TOY


class TestCli:
    def test_inspect(self, capsys):
        assert main(["inspect", "--fcidump", str(H2)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "# qubits=4"
        assert out[1] == "# electrons=2"
        assert out[2] == "# terms=15"
        assert float(out[3].split("=")[1]) == pytest.approx(-1.1166843871, abs=1e-9)
        assert out[4] == "# n_qubits=4"

    def test_exact(self, capsys):
        assert main(["exact", "--hamiltonian", str(TOY)]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(-1.15, abs=1e-12)

    def test_exact_sector(self, capsys):
        assert main(["exact", "--hamiltonian", str(H2), "--sector"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(-1.1372701747, abs=1e-9)

    def test_run(self, tmp_path, capsys):
        cfg = tmp_path / "h2.json"
        cfg.write_text(json.dumps({"hamiltonian_source": str(H2), "iterations": 3}))
        assert main(["run", "--config", str(cfg)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n_qubits"] == 4 and report["status"] == "ok"
        trace = (tmp_path / "h2.trace.csv").read_text().splitlines()
        assert trace[0] == "iteration,energy_hartree,cum_evals,elapsed_s"
        assert len(trace) == 5

    def test_run_relative_source(self, tmp_path, capsys):
        (tmp_path / "toy.fcidump").write_text(open(TOY).read())
        cfg = tmp_path / "toy.json"
        cfg.write_text(json.dumps({"hamiltonian_source": "toy.fcidump", "ansatz": "pcu2", "iterations": 0}))
        assert main(["run", "--config", str(cfg)]) == 0
        assert json.loads(capsys.readouterr().out)["exact_energy"] == pytest.approx(-1.15)

    def test_sweep(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"hamiltonian_source": str(H2), "init": ["zeros", "ones"], "iterations": 2}))
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "out"), "--parallelism", "2"]) == 0
        assert "2 runs, 0 failed" in capsys.readouterr().out
        assert len((tmp_path / "out" / "summary.csv").read_text().splitlines()) == 3

    def test_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"hamiltonian_source": str(H2), "optimizer": "lbfgs"}))
        assert main(["run", "--config", str(cfg)]) == 2
        assert "lbfgs" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["exact", "--hamiltonian", str(tmp_path / "nope")]) == 2

    def test_inspect_rejects_pauli_text(self, tmp_path, capsys):
        p = tmp_path / "z.pauli"
        p.write_text("# n_qubits=1\n1.0 0.0 Z\n")
        assert main(["inspect", "--fcidump", str(p)]) == 2
