"""``vqe-bench`` command line."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from vqe_bench.exact import exact_ground_energy
from vqe_bench.harness import ConfigError, RunConfig, expand_sweep, load_config, read_hamiltonian, run_single, run_sweep
from vqe_bench.sim import StateVector, expectation_exact


def _cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.config)
    cfg = RunConfig.from_dict(load_config(path))
    trace, report = run_single(cfg, base_dir=path.parent)
    out = path.with_name(path.stem + ".trace.csv")
    out.write_text(trace.to_csv())
    print(report.to_json())
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    path = Path(args.config)
    configs = expand_sweep(load_config(path))
    rows = run_sweep(configs, args.out, parallelism=args.parallelism, base_dir=path.parent)
    failed = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} runs, {failed} failed; summary in {Path(args.out) / 'summary.csv'}")
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    h, n_el = read_hamiltonian(args.hamiltonian)
    n_particles = args.n_particles
    if args.sector and n_particles is None:
        n_particles = n_el
    print(repr(exact_ground_energy(h, n_particles=n_particles, method=args.method)))
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    h, n_el = read_hamiltonian(args.fcidump)
    if n_el is None:
        raise ConfigError(f"{args.fcidump} is not an FCIDUMP file")
    hf = expectation_exact(StateVector.basis(h.n_qubits, (1 << n_el) - 1), h)
    print(f"# qubits={h.n_qubits}")
    print(f"# electrons={n_el}")
    print(f"# terms={len(h)}")
    print(f"# hf_energy={hf!r}")
    sys.stdout.write(h.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqe-bench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run; prints the report JSON")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="cross product of list-valued config keys")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("exact", help="exact ground energy of a Hamiltonian file")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--n-particles", type=int, default=None)
    p.add_argument("--sector", action="store_true", help="restrict to the FCIDUMP electron count")
    p.add_argument("--method", choices=("auto", "dense", "lanczos"), default="auto")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("inspect", help="summarize the qubit Hamiltonian of an FCIDUMP")
    p.add_argument("--fcidump", required=True)
    p.set_defaults(func=_cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"vqe-bench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
