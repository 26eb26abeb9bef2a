"""Configuration-matrix runner: one VQE run per config, sweeps, metrics and CSV output."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import itertools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from vqe_bench import __version__
from vqe_bench.ansatz import ElectronConfig, build_ansatz, normalize_kind
from vqe_bench.chem import active_space, parse_fcidump, qubit_hamiltonian
from vqe_bench.exact import ITERATIVE_MAX_QUBITS, exact_ground_energy
from vqe_bench.grad import EXACT, EnergyFn, Sampled
from vqe_bench.opt import OPTIMIZERS, ConvergenceTrace, SpsaState, run_optimization
from vqe_bench.pauli import PauliSum, parse_text
from vqe_bench.sim import StateVector, expectation_exact

log = logging.getLogger(__name__)

INIT_SCHEMES = ("zeros", "halves", "ones", "random")
TOLERANCE_HARTREE = 1e-3
STABILITY_WINDOW = 10
SUMMARY_COLUMNS = (
    "init", "ansatz", "optimizer", "final_energy", "exact_energy", "rel_error_pct",
    "abs_error", "stability", "iters_to_tol", "seed", "status",
)
THREADS_ENV = "VQE_BENCH_THREADS"


class ConfigError(ValueError):
    """Invalid run or sweep configuration."""


# ------------------------------------------------------------ initialization

def init_params(scheme: str, count: int, seed: int | None = None) -> np.ndarray:
    """Initial parameters: all 0, all 0.5, all 1, or i.i.d. U(0, 1) draws."""
    if count < 0:
        raise ValueError("count must be non-negative")
    scheme = scheme.lower()
    if scheme == "zeros":
        return np.zeros(count)
    if scheme == "halves":
        return np.full(count, 0.5)
    if scheme == "ones":
        return np.ones(count)
    if scheme == "random":
        return np.random.default_rng(seed).uniform(0.0, 1.0, count)
    raise ValueError(f"unknown init scheme {scheme!r}; choose from {', '.join(INIT_SCHEMES)}")


# ------------------------------------------------------------------- metrics

def relative_error(e_hat: float, e_exp: float) -> float:
    """``|e_hat - e_exp| / |e_exp|`` as a fraction."""
    if e_exp == 0:
        raise ValueError("reference energy must be non-zero")
    return abs(e_hat - e_exp) / abs(e_exp)


def stability(energies: Sequence[float], window: int = STABILITY_WINDOW) -> float:
    """Population standard deviation of the last ``window`` energies."""
    tail = np.asarray(energies[-window:], dtype=float)
    return float(np.std(tail)) if tail.size else 0.0


def iterations_to_tolerance(energies: Sequence[float], tol: float = TOLERANCE_HARTREE) -> int:
    """First iteration whose energy lies within ``tol`` of the final energy."""
    final = energies[-1]
    for i, e in enumerate(energies):
        if abs(e - final) <= tol:
            return i
    return len(energies) - 1


# -------------------------------------------------------------------- config

@dataclass(frozen=True)
class RunConfig:
    hamiltonian_source: str
    ansatz: str = "uccsd"
    layers: int = 2
    k: int = 3
    optimizer: str = "adam"
    learning_rate: float = 0.5
    spsa_a: float = 0.5
    spsa_c: float = 0.1
    spsa_A: float | None = None
    init: str = "zeros"
    iterations: int = 50
    mode: str = "exact"
    shots: int = 1024
    reference_energy: float | None = None
    run_seed: int = 0
    n_electrons: int | None = None
    frozen_orbitals: int = 0
    active_orbitals: int | None = None
    timing: bool = True

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "ansatz", normalize_kind(self.ansatz))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "optimizer", self.optimizer.lower())
        object.__setattr__(self, "init", self.init.lower())
        object.__setattr__(self, "mode", self.mode.lower())
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.init not in INIT_SCHEMES:
            raise ConfigError(f"unknown init scheme {self.init!r}")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.optimizer != "spsa":
            raise ConfigError(f"{self.optimizer} needs exact gradients; only spsa runs in sampled mode")
        if self.iterations < 0 or self.shots < 1:
            raise ConfigError("iterations must be >= 0 and shots >= 1")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "hamiltonian_source" not in data:
            raise ConfigError("config needs 'hamiltonian_source'")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def derived_seed(self) -> int:
        """Seed from ``run_seed`` and a hash of the numerical settings."""
        payload = {k: v for k, v in self.to_dict().items() if k != "timing"}
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).digest()
        return int.from_bytes(digest[:8], "little")

    def run_id(self) -> str:
        return f"{self.init}_{self.ansatz}_{self.optimizer}_s{self.run_seed}_{self.derived_seed() % 16**8:08x}"


def load_config(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def expand_sweep(data: dict[str, Any]) -> list[RunConfig]:
    """Cross product of every list-valued key; scalars are shared by all runs."""
    axes = [(k, v) for k, v in data.items() if isinstance(v, list)]
    base = {k: v for k, v in data.items() if not isinstance(v, list)}
    configs = []
    for combo in itertools.product(*(v for _, v in axes)):
        cfg = dict(base)
        cfg.update(zip((k for k, _ in axes), combo))
        configs.append(RunConfig.from_dict(cfg))
    return configs


# ------------------------------------------------------------------- problem

@dataclass(frozen=True)
class Problem:
    hamiltonian: PauliSum
    n_electrons: int
    hf_energy: float
    exact_energy: float | None


def _resolve(source: str, base_dir: str | Path | None) -> Path:
    p = Path(source)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return p


def read_hamiltonian(path: str | Path) -> tuple[PauliSum, int | None]:
    """Load an FCIDUMP or a Pauli-sum text file; returns the qubit
    Hamiltonian and, for FCIDUMP input, the electron count."""
    text = Path(path).read_text()
    if "&FCI" in text[:400].upper():
        ints = parse_fcidump(text)
        return qubit_hamiltonian(ints), ints.n_electrons
    return parse_text(text), None


@lru_cache(maxsize=32)
def _load_problem(path: str, mtime: float, n_electrons: int | None, frozen: int, active: int | None) -> Problem:
    text = Path(path).read_text()
    if "&FCI" in text[:400].upper():
        ints = parse_fcidump(text)
        if frozen or active is not None:
            act = active if active is not None else ints.n_spatial_orbitals - frozen
            ints = active_space(ints, frozen, act)
        h = qubit_hamiltonian(ints)
        ne = ints.n_electrons
        if n_electrons is not None and n_electrons != ne:
            raise ConfigError(f"n_electrons={n_electrons} conflicts with {ne} in {path}")
    else:
        if frozen or active is not None:
            raise ConfigError("active-space options need an FCIDUMP source")
        if n_electrons is None:
            raise ConfigError(f"{path}: Pauli-sum sources need 'n_electrons' in the config")
        h = parse_text(text)
        ne = n_electrons
    hf = expectation_exact(StateVector.basis(h.n_qubits, (1 << ne) - 1), h)
    e0 = exact_ground_energy(h, n_particles=ne) if h.n_qubits <= ITERATIVE_MAX_QUBITS else None
    return Problem(h, ne, hf, e0)


def load_problem(cfg: RunConfig, base_dir: str | Path | None = None) -> Problem:
    """Compile (and cache) the Hamiltonian, HF energy and oracle energy for a config."""
    path = _resolve(cfg.hamiltonian_source, base_dir)
    if not path.exists():
        raise FileNotFoundError(f"Hamiltonian source not found: {path}")
    return _load_problem(str(path.resolve()), path.stat().st_mtime, cfg.n_electrons, cfg.frozen_orbitals, cfg.active_orbitals)


# -------------------------------------------------------------------- report

@dataclass
class BenchmarkReport:
    final_energy: float
    exact_energy: float | None
    hf_energy: float
    reference_energy: float | None
    relative_error: float | None
    rel_error_pct: float | None
    abs_error: float | None
    min_energy: float
    stability: float
    iters_to_tol: int
    n_qubits: int
    n_params: int
    n_evals: int
    seed: int
    config: RunConfig
    version: str = __version__
    status: str = "ok"

    def to_dict(self) -> dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "config"}
        out.update(self.config.to_dict())
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_single(cfg: RunConfig, base_dir: str | Path | None = None) -> tuple[ConvergenceTrace, BenchmarkReport]:
    """Compile, build, initialize, optimize and score one configuration."""
    problem = load_problem(cfg, base_dir)
    h = problem.hamiltonian
    ansatz = build_ansatz(cfg.ansatz, ElectronConfig(problem.n_electrons, h.n_qubits), layers=cfg.layers, k=cfg.k)
    seed = cfg.derived_seed()
    seeds = np.random.SeedSequence(seed).generate_state(3)
    mode = EXACT if cfg.mode == "exact" else Sampled(cfg.shots, int(seeds[1]))
    f = EnergyFn(ansatz.circuit, h, mode)
    theta0 = init_params(cfg.init, ansatz.n_params, int(seeds[0]))
    spsa = SpsaState(
        a=cfg.spsa_a,
        c=cfg.spsa_c,
        A=cfg.spsa_A if cfg.spsa_A is not None else 0.1 * cfg.iterations,
        rng_seed=int(seeds[2]),
    )
    trace = run_optimization(f, theta0, cfg.optimizer, cfg.iterations, eta=cfg.learning_rate, spsa=spsa, timing=cfg.timing)

    energies = trace.energies
    final = float(energies[-1])
    e0 = problem.exact_energy
    e_ref = cfg.reference_energy if cfg.reference_energy is not None else e0
    rel = relative_error(final, e_ref) if e_ref is not None else None
    report = BenchmarkReport(
        final_energy=final,
        exact_energy=e0,
        hf_energy=problem.hf_energy,
        reference_energy=e_ref,
        relative_error=rel,
        rel_error_pct=None if rel is None else 100.0 * rel,
        abs_error=None if e0 is None else abs(final - e0),
        min_energy=float(energies.min()),
        stability=stability(energies),
        iters_to_tol=iterations_to_tolerance(energies),
        n_qubits=h.n_qubits,
        n_params=ansatz.n_params,
        n_evals=f.eval_count,
        seed=seed,
        config=cfg,
    )
    return trace, report


# --------------------------------------------------------------------- sweep

@dataclass
class SummaryRow:
    init: str
    ansatz: str
    optimizer: str
    final_energy: float | None
    exact_energy: float | None
    rel_error_pct: float | None
    abs_error: float | None
    stability: float | None
    iters_to_tol: int | None
    seed: int
    status: str

    @classmethod
    def from_report(cls, r: BenchmarkReport) -> "SummaryRow":
        c = r.config
        return cls(c.init, c.ansatz, c.optimizer, r.final_energy, r.exact_energy, r.rel_error_pct,
                   r.abs_error, r.stability, r.iters_to_tol, c.run_seed, r.status)

    @classmethod
    def failed(cls, cfg: RunConfig, message: str) -> "SummaryRow":
        status = "error: " + " ".join(message.split())
        return cls(cfg.init, cfg.ansatz, cfg.optimizer, None, None, None, None, None, None, cfg.run_seed, status)


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_summary(rows: Iterable[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in SUMMARY_COLUMNS])
    return buf.getvalue()


def read_summary(text: str) -> list[SummaryRow]:
    def num(s: str, kind=float):
        return None if s == "" else kind(s)

    rows = []
    for d in csv.DictReader(io.StringIO(text)):
        rows.append(SummaryRow(
            d["init"], d["ansatz"], d["optimizer"], num(d["final_energy"]), num(d["exact_energy"]),
            num(d["rel_error_pct"]), num(d["abs_error"]), num(d["stability"]), num(d["iters_to_tol"], int),
            int(d["seed"]), d["status"],
        ))
    return rows


def write_table(rows: Sequence[SummaryRow]) -> str:
    """Pivot to init x ansatz rows and one relative-error (%) column per
    optimizer; cells hold the median over seeds."""
    inits = [i for i in INIT_SCHEMES if any(r.init == i for r in rows)]
    ansatze = sorted({r.ansatz for r in rows}, key=_ANSATZ_ORDER.get)
    opts = [o for o in OPTIMIZERS if any(r.optimizer == o for r in rows)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["init", "ansatz", *opts])
    for i in inits:
        for a in ansatze:
            cells = []
            for o in opts:
                vals = [r.rel_error_pct for r in rows if (r.init, r.ansatz, r.optimizer) == (i, a, o) and r.rel_error_pct is not None]
                cells.append(f"{float(np.median(vals)):.4f}" if vals else "")
            w.writerow([i, a, *cells])
    return buf.getvalue()


_ANSATZ_ORDER = {"dexcg": 0, "pcu2": 1, "uccsd": 2, "kupccgsd": 3}


def _sort_key(cfg: RunConfig) -> tuple:
    return (INIT_SCHEMES.index(cfg.init), _ANSATZ_ORDER[cfg.ansatz], OPTIMIZERS.index(cfg.optimizer), cfg.run_seed, cfg.run_id())


def _run_one(args: tuple[RunConfig, str | None]) -> tuple[RunConfig, str | None, str | None, SummaryRow]:
    cfg, base_dir = args
    try:
        trace, report = run_single(cfg, base_dir)
    except Exception as exc:  # a failed run is recorded, the sweep goes on
        log.warning("run %s failed: %s", cfg.run_id(), exc)
        return cfg, None, None, SummaryRow.failed(cfg, f"{type(exc).__name__}: {exc}")
    return cfg, trace.to_csv(), report.to_json(), SummaryRow.from_report(report)


def max_workers(parallelism: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = max(1, parallelism)
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def run_sweep(
    configs: Sequence[RunConfig],
    out_dir: str | Path,
    parallelism: int = 1,
    base_dir: str | Path | None = None,
) -> list[SummaryRow]:
    """Run every config, write per-run traces and reports plus ``summary.csv``
    and ``table.csv`` into ``out_dir``; returns the summary rows."""
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    ordered = sorted(configs, key=_sort_key)
    base = None if base_dir is None else str(base_dir)
    jobs = [(c, base) for c in ordered]

    workers = max_workers(parallelism)
    if workers > 1 and len(jobs) > 1:
        # Warm the cache so forked workers inherit compiled Hamiltonians.
        for c in {(c.hamiltonian_source, c.n_electrons, c.frozen_orbitals, c.active_orbitals): c for c in ordered}.values():
            try:
                load_problem(c, base)
            except Exception:
                pass
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    rows = []
    for cfg, trace_csv, report_json, row in results:
        if trace_csv is not None:
            (out / "traces" / f"{cfg.run_id()}.csv").write_text(trace_csv)
            (out / "reports" / f"{cfg.run_id()}.json").write_text(report_json)
        rows.append(row)
    (out / "summary.csv").write_text(write_summary(rows))
    (out / "table.csv").write_text(write_table(rows))
    return rows
