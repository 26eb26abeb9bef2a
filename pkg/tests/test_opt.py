import numpy as np
import pytest

from vqe_bench.ansatz import ElectronConfig, build_ansatz
from vqe_bench.exact import exact_ground_energy
from vqe_bench.grad import EnergyFn, Sampled
from vqe_bench.opt import (
    AdamState,
    ConvergenceTrace,
    GdConfig,
    SpsaState,
    adam_step,
    gd_step,
    run_optimization,
    spsa_step,
)
from vqe_bench.pauli import PauliSum, PauliWord
from vqe_bench.sim import Circuit, GateKind, GateOp

H2_CFG = ElectronConfig(2, 4)


def square(theta):
    return float(np.sum(np.asarray(theta) ** 2))


class Counter:
    def __init__(self, fn):
        self.fn, self.calls = fn, 0

    def __call__(self, theta):
        self.calls += 1
        return self.fn(theta)


class TestGd:
    def test_quadratic_one_step(self):
        assert gd_step([1.0], [2.0], GdConfig(0.5))[0] == 0.0

    def test_zero_gradient(self):
        np.testing.assert_array_equal(gd_step([0.3, -2.0], [0.0, 0.0]), [0.3, -2.0])

    def test_two_steps(self):
        theta = np.array([1.0])
        for _ in range(2):
            theta = gd_step(theta, 2 * theta, GdConfig(0.1))
        assert theta[0] == pytest.approx(0.64, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            gd_step([1.0, 2.0], [1.0])

    def test_bad_eta(self):
        with pytest.raises(ValueError):
            GdConfig(0.0)


class TestSpsa:
    @pytest.mark.parametrize("delta", [1.0, -1.0])
    def test_quadratic_estimate(self, delta):
        state = SpsaState(a=1.0, c=0.1, A=0.0, alpha=0.0, gamma=0.0)
        new, state = spsa_step([1.0], square, state, delta=[delta])
        # a_0 = 1 and the estimate is the exact gradient 2.
        assert new[0] == pytest.approx(-1.0, abs=1e-12)
        assert state.t == 1

    def test_two_evaluations(self):
        f = Counter(square)
        state = SpsaState()
        theta = np.ones(7)
        for _ in range(5):
            theta, state = spsa_step(theta, f, state)
        assert f.calls == 10

    def test_schedules(self):
        s = SpsaState(a=0.5, c=0.1, A=5)
        assert s.a_t == pytest.approx(0.5 / 6**0.602)
        s.t = 9
        assert s.c_t == pytest.approx(0.1 / 10**0.101)

    def test_deterministic(self):
        runs = []
        for _ in range(2):
            state, theta = SpsaState(rng_seed=42), np.ones(4)
            for _ in range(10):
                theta, state = spsa_step(theta, square, state)
            runs.append(theta)
        np.testing.assert_array_equal(runs[0], runs[1])

    def test_rademacher(self):
        seen = []
        state = SpsaState(rng_seed=1)

        def record(theta):
            seen.append(np.asarray(theta).copy())
            return 0.0

        spsa_step(np.zeros(50), record, state)
        delta = (seen[0] - seen[1]) / (2 * 0.1)
        assert set(np.round(delta, 12)) == {-1.0, 1.0}

    def test_bad_c(self):
        with pytest.raises(ValueError):
            SpsaState(c=0.0)


class TestAdam:
    def test_first_step_is_sign(self):
        g = np.array([3.0, -0.02, 1e-3])
        new, state = adam_step(np.zeros(3), g, AdamState(eta=0.5))
        np.testing.assert_allclose(new, -0.5 * g / (np.abs(g) + 1e-8), atol=1e-12)
        assert state.t == 1

    def test_zero_gradient(self):
        new, _ = adam_step([0.7], [0.0])
        assert new[0] == 0.7

    def test_quadratic_recurrence(self):
        # Hand-executed recurrence for f = theta^2 from 1 with eta 0.5.
        theta, state = np.array([1.0]), AdamState(eta=0.5)
        path = []
        for _ in range(3):
            theta, state = adam_step(theta, 2 * theta, state)
            path.append(theta[0])
        assert path[0] == pytest.approx(0.5, abs=1e-8)
        assert path[1] == pytest.approx(0.033906, abs=1e-5)
        assert path[2] == pytest.approx(-0.33589, abs=1e-4)

    def test_step_bound_steady_gradients(self):
        # Bounded by eta when gradients do not shrink abruptly.
        theta, state = np.array([2.0, -3.0]), AdamState(eta=0.5)
        for _ in range(50):
            new, state = adam_step(theta, 2 * theta, state)
            assert np.all(np.abs(new - theta) <= 0.5 * 1.0001)
            theta = new

    def test_step_bound_on_h2(self, h2_ham):
        from vqe_bench.grad import gradient_fd

        f = EnergyFn(build_ansatz("uccsd", H2_CFG), h2_ham)
        theta, state = np.random.default_rng(5).uniform(0, 1, 3), AdamState(eta=0.5)
        for _ in range(50):
            new, state = adam_step(theta, gradient_fd(f, theta), state)
            assert np.all(np.abs(new - theta) <= 0.5 * 1.0001)
            theta = new

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            adam_step([1.0], [1.0, 2.0])


class TestRunOptimization:
    def _rx(self):
        return EnergyFn(Circuit(1, [GateOp(GateKind.RX, (0,), 0)], 1), PauliSum(1, {PauliWord.from_str("Z"): 1.0}))

    def test_zero_iterations(self):
        f = self._rx()
        trace = run_optimization(f, [0.4], "gd", iterations=0)
        assert len(trace.records) == 1
        assert trace.records[0].energy == pytest.approx(np.cos(0.4), abs=1e-15)

    def test_eval_accounting(self, h2_ham):
        for kind, per_iter in [("gd", 2 * 3 + 1), ("adam", 2 * 3 + 1), ("spsa", 3)]:
            f = EnergyFn(build_ansatz("uccsd", H2_CFG), h2_ham)
            trace = run_optimization(f, np.zeros(3), kind, iterations=4)
            counts = [r.cum_evals for r in trace.records]
            assert counts == [1 + per_iter * i for i in range(5)]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            run_optimization(self._rx(), [0.1], "lbfgs")

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            run_optimization(self._rx(), [0.1, 0.2], "gd")

    def test_uccsd_h2_adam(self, h2_ham):
        f = EnergyFn(build_ansatz("uccsd", H2_CFG), h2_ham)
        trace = run_optimization(f, np.zeros(3), "adam", iterations=50)
        e0 = exact_ground_energy(h2_ham, n_particles=2)
        assert abs(trace.final_energy - e0) < 1.6e-3
        assert np.all(trace.energies >= e0 - 1e-9)

    def test_deterministic_traces(self, h2_ham):
        texts = []
        for _ in range(2):
            f = EnergyFn(build_ansatz("uccsd", H2_CFG), h2_ham, Sampled(128, 3))
            trace = run_optimization(f, np.full(3, 0.5), "spsa", iterations=5, spsa=SpsaState(rng_seed=8), timing=False)
            texts.append(trace.to_csv())
        assert texts[0] == texts[1]

    def test_csv_roundtrip(self, h2_ham):
        f = EnergyFn(build_ansatz("uccsd", H2_CFG), h2_ham)
        trace = run_optimization(f, np.zeros(3), "gd", iterations=3)
        again = ConvergenceTrace.from_csv(trace.to_csv())
        np.testing.assert_array_equal(again.energies, trace.energies)
        assert [r.cum_evals for r in again.records] == [r.cum_evals for r in trace.records]
