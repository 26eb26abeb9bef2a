import numpy as np
import pytest

from vqe_bench.chem import active_space, qubit_hamiltonian
from vqe_bench.exact import dense_ground_energy, exact_ground_energy, lanczos_ground_energy, sector_indices
from vqe_bench.pauli import CapacityError, PauliSum, PauliWord, to_dense_matrix


def random_hermitian_sum(n, n_terms, seed):
    rng = np.random.default_rng(seed)
    terms = {}
    for _ in range(n_terms):
        axes = "".join(rng.choice(list("IXYZ"), n))
        terms[PauliWord.from_str(axes)] = terms.get(PauliWord.from_str(axes), 0) + rng.normal()
    return PauliSum(n, terms)


class TestExamples:
    def test_single_z(self):
        assert exact_ground_energy(PauliSum(1, {PauliWord.from_str("Z"): 1.0})) == pytest.approx(-1.0)

    def test_hopping_singlet(self):
        h = PauliSum(2, {PauliWord.from_str("XX"): 0.5, PauliWord.from_str("YY"): 0.5})
        assert exact_ground_energy(h) == pytest.approx(-1.0, abs=1e-12)

    def test_toy(self):
        from vqe_bench.harness import read_hamiltonian
        from conftest import TOY

        h, ne = read_hamiltonian(TOY)
        assert exact_ground_energy(h) == pytest.approx(-1.15, abs=1e-12)
        assert exact_ground_energy(h, n_particles=ne) == pytest.approx(-1.15, abs=1e-12)

    def test_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            exact_ground_energy(PauliSum(1, {PauliWord.from_str("X"): 1j}))

    def test_capacity(self):
        big = PauliSum(15, {PauliWord(15, 0, 1): 1.0})
        with pytest.raises(CapacityError):
            exact_ground_energy(big, method="dense")
        huge = PauliSum(21, {PauliWord(21, 0, 1): 1.0})
        with pytest.raises(CapacityError):
            exact_ground_energy(huge)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            exact_ground_energy(PauliSum(1, {PauliWord.from_str("Z"): 1.0}), method="qr")

    def test_empty_sector(self):
        with pytest.raises(ValueError):
            exact_ground_energy(PauliSum(2, {PauliWord.from_str("ZZ"): 1.0}), n_particles=3)


class TestCrossOracle:
    @pytest.mark.parametrize("n,seed", [(2, 0), (3, 1), (5, 2), (8, 3)])
    def test_dense_vs_numpy(self, n, seed):
        h = random_hermitian_sum(n, 4 * n, seed)
        assert dense_ground_energy(h) == pytest.approx(np.linalg.eigvalsh(to_dense_matrix(h))[0], abs=1e-10)

    @pytest.mark.parametrize("n,seed", [(3, 4), (6, 5), (9, 6), (10, 7)])
    def test_dense_vs_lanczos(self, n, seed):
        h = random_hermitian_sum(n, 3 * n, seed)
        assert lanczos_ground_energy(h) == pytest.approx(dense_ground_energy(h), abs=1e-8)

    def test_sector_vs_projection(self, h2_ham):
        dense = to_dense_matrix(h2_ham)
        idx = sector_indices(4, 2)
        assert list(idx) == [3, 5, 6, 9, 10, 12]
        expected = np.linalg.eigvalsh(dense[np.ix_(idx, idx)])[0]
        assert dense_ground_energy(h2_ham, 2) == pytest.approx(expected, abs=1e-12)
        assert lanczos_ground_energy(h2_ham, 2) == pytest.approx(expected, abs=1e-8)

    def test_lih_active_lanczos(self, lih_ints):
        h = qubit_hamiltonian(active_space(lih_ints, 1, 5))
        assert lanczos_ground_energy(h, 2) == pytest.approx(dense_ground_energy(h, 2), abs=1e-8)

    def test_lih_sector(self, lih_ints):
        h = qubit_hamiltonian(lih_ints)
        assert lanczos_ground_energy(h, 4) == pytest.approx(dense_ground_energy(h, 4), abs=1e-8)

    @pytest.mark.slow
    def test_lih_full_space_dense(self, lih_ints):
        # Full 4096-dimensional space; the sector minimum is also the global one here.
        h = qubit_hamiltonian(lih_ints)
        full = dense_ground_energy(h)
        assert full <= dense_ground_energy(h, 4) + 1e-10
        assert full == pytest.approx(lanczos_ground_energy(h), abs=1e-8)
