import numpy as np
import pytest

from vqe_bench import data_path
from vqe_bench.chem import qubit_hamiltonian, read_fcidump

H2 = data_path("h2_sto3g.fcidump")
LIH = data_path("lih_sto3g.fcidump")
TOY = data_path("toy_1orb.fcidump")

# Single-qubit matrices used by the independent dense oracles.
I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]])
Z2 = np.diag([1.0 + 0j, -1.0])
PAULI_2x2 = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def kron_word(axes: str) -> np.ndarray:
    """Dense matrix of a word by Kronecker products; qubit 0 is the least significant bit."""
    out = np.eye(1, dtype=complex)
    for ch in axes:
        out = np.kron(PAULI_2x2[ch], out)
    return out


@pytest.fixture(scope="session")
def h2_ints():
    return read_fcidump(H2)


@pytest.fixture(scope="session")
def h2_ham(h2_ints):
    return qubit_hamiltonian(h2_ints)


@pytest.fixture(scope="session")
def lih_ints():
    return read_fcidump(LIH)


ACCEPTANCE_LINES: dict[str, str] = {}


def report_criterion(name: str, passed: bool, detail: str) -> None:
    line = f"{name} {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[name] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for name in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[name])
