"""Gradient descent, SPSA and ADAM over an :class:`~vqe_bench.grad.EnergyFn`."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from vqe_bench.grad import EnergyFn, gradient_fd

OPTIMIZERS = ("gd", "spsa", "adam")
DEFAULT_ITERATIONS = 50
DEFAULT_ETA = 0.5
TRACE_COLUMNS = ("iteration", "energy_hartree", "cum_evals", "elapsed_s")


def _check_lengths(theta: np.ndarray, grad: np.ndarray) -> None:
    if theta.shape != grad.shape:
        raise ValueError(f"parameter and gradient shapes differ: {theta.shape} vs {grad.shape}")


# ----------------------------------------------------------------------- GD

@dataclass(frozen=True)
class GdConfig:
    eta: float = DEFAULT_ETA

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise ValueError("learning rate must be positive")


def gd_step(theta, grad, cfg: GdConfig = GdConfig()) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    _check_lengths(theta, grad)
    return theta - cfg.eta * grad


# --------------------------------------------------------------------- SPSA

@dataclass
class SpsaState:
    """Gain schedules ``a_t = a / (A + t + 1)^alpha`` and ``c_t = c / (t + 1)^gamma``."""

    a: float = DEFAULT_ETA
    c: float = 0.1
    A: float = 5.0
    alpha: float = 0.602
    gamma: float = 0.101
    rng_seed: int = 0
    t: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("perturbation size c must be positive")
        self.rng = np.random.default_rng(self.rng_seed)

    @property
    def a_t(self) -> float:
        return self.a / (self.A + self.t + 1) ** self.alpha

    @property
    def c_t(self) -> float:
        return self.c / (self.t + 1) ** self.gamma


def spsa_gradient(f: Callable[[np.ndarray], float], theta: np.ndarray, c_t: float, delta: np.ndarray) -> np.ndarray:
    """Two-evaluation simultaneous-perturbation gradient estimate."""
    diff = f(theta + c_t * delta) - f(theta - c_t * delta)
    return diff / (2.0 * c_t) / delta


def spsa_step(theta, f: Callable[[np.ndarray], float], state: SpsaState, delta=None) -> tuple[np.ndarray, SpsaState]:
    """One SPSA update; draws a Rademacher perturbation unless ``delta`` is given."""
    theta = np.asarray(theta, dtype=float)
    if delta is None:
        delta = state.rng.choice(np.array([-1.0, 1.0]), size=theta.shape)
    else:
        delta = np.asarray(delta, dtype=float).reshape(theta.shape)
    g_hat = spsa_gradient(f, theta, state.c_t, delta)
    new_theta = theta - state.a_t * g_hat
    state.t += 1
    return new_theta, state


# --------------------------------------------------------------------- ADAM

@dataclass(frozen=True)
class AdamState:
    eta: float = DEFAULT_ETA
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    t: int = 0


def adam_step(theta, grad, state: AdamState = AdamState()) -> tuple[np.ndarray, AdamState]:
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    _check_lengths(theta, grad)
    m = np.zeros_like(theta) if state.m is None else state.m
    v = np.zeros_like(theta) if state.v is None else state.v
    _check_lengths(theta, m)
    t = state.t + 1
    m = state.beta1 * m + (1 - state.beta1) * grad
    v = state.beta2 * v + (1 - state.beta2) * grad**2
    m_hat = m / (1 - state.beta1**t)
    v_hat = v / (1 - state.beta2**t)
    new_theta = theta - state.eta * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return new_theta, replace(state, m=m, v=v, t=t)


# -------------------------------------------------------------------- traces

@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    energy: float
    cum_evals: int
    elapsed_s: float


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)
    final_theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in self.records:
            w.writerow([r.iteration, repr(r.energy), r.cum_evals, f"{r.elapsed_s:.6f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceTrace":
        rows = list(csv.DictReader(io.StringIO(text)))
        records = [
            TraceRecord(int(r["iteration"]), float(r["energy_hartree"]), int(r["cum_evals"]), float(r["elapsed_s"]))
            for r in rows
        ]
        return cls(records)


def run_optimization(
    f: EnergyFn,
    theta0,
    kind: str = "adam",
    iterations: int = DEFAULT_ITERATIONS,
    *,
    eta: float = DEFAULT_ETA,
    spsa: SpsaState | None = None,
    timing: bool = True,
) -> ConvergenceTrace:
    """Run ``iterations`` optimizer steps from ``theta0`` and trace ``E(theta_t)``.

    GD and ADAM take finite-difference gradients; SPSA uses two perturbed
    evaluations per step. Each step also spends one evaluation on the trace.
    With ``timing=False`` the elapsed-time column is written as zero so
    traces are byte-reproducible.
    """
    kind = kind.lower()
    if kind not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {kind!r}; choose from {', '.join(OPTIMIZERS)}")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    theta = np.asarray(theta0, dtype=float).reshape(-1).copy()
    if theta.size != f.n_params:
        raise ValueError(f"expected {f.n_params} initial parameters, got {theta.size}")

    start = time.perf_counter()
    clock = (lambda: time.perf_counter() - start) if timing else (lambda: 0.0)
    trace = ConvergenceTrace()
    trace.records.append(TraceRecord(0, f(theta), f.eval_count, clock()))

    gd_cfg = GdConfig(eta)
    adam = AdamState(eta=eta)
    spsa = spsa if spsa is not None else SpsaState()
    for it in range(1, iterations + 1):
        if kind == "gd":
            theta = gd_step(theta, gradient_fd(f, theta), gd_cfg)
        elif kind == "adam":
            theta, adam = adam_step(theta, gradient_fd(f, theta), adam)
        else:
            theta, spsa = spsa_step(theta, f, spsa)
        trace.records.append(TraceRecord(it, f(theta), f.eval_count, clock()))
    trace.final_theta = theta
    return trace
