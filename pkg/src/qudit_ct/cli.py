"""Command-line front end: ``ct-sim {build,render,verify,sweep,sample}``.

Exit codes: 0 when every requested check passes, 1 on a verification
failure, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import protocols
from .circuit import dumps, render_text
from .gates import random_state
from .simulate import SamplingError, sample
from .tensor import DimensionError, check_cap
from .verify import DEFAULT_TOL, reports_to_csv, reports_to_jsonl, run_protocol, sweep

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    protocol: str = "ct-controlled"
    d: list[int] = field(default_factory=lambda: [2])
    n: list[int] = field(default_factory=lambda: [1])
    seed: int = 0
    seeds: int = 1
    tol: float = DEFAULT_TOL
    output: str | None = None
    format: str = "json"
    jobs: int = 1
    timing: bool = False

    def __post_init__(self):
        if any(d < 2 for d in self.d):
            raise ConfigError(f"d must be >= 2, got {self.d}")
        if any(n < 1 for n in self.n):
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.seeds < 0:
            raise ConfigError("--seeds must be nonnegative")
        if self.command != "sweep" and (len(self.d) != 1 or len(self.n) != 1):
            raise ConfigError(f"'{self.command}' takes a single --d and --n")


def _int_list(text: str) -> list[int]:
    if text == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ct-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("build", "render", "verify", "sweep", "sample"):
        p = sub.add_parser(name)
        p.add_argument("--protocol", default="ct-controlled", choices=sorted(protocols.PROTOCOLS))
        p.add_argument("--d", type=_int_list, default=[2])
        p.add_argument("--n", type=_int_list, default=[1])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--output", default=None)
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        if name == "sweep":
            p.add_argument("--seeds", type=int, default=1, help="number of seeds, counting up from --seed")
            p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        if name in ("verify", "sweep"):
            p.add_argument("--timing", action="store_true", help="include wall_time in JSON")
    return parser


def _write(path: str | None, text: str) -> None:
    """Write atomically (temp file + rename); stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=".ct-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        protocol=args.protocol,
        d=args.d,
        n=args.n,
        seed=args.seed,
        seeds=getattr(args, "seeds", 1),
        tol=args.tol,
        output=args.output,
        format=args.format,
        jobs=getattr(args, "jobs", 1),
        timing=getattr(args, "timing", False),
    )


def _instance(cfg: RunConfig) -> protocols.ProtocolInstance:
    d, n = cfg.d[0], cfg.n[0]
    check_cap(d, protocols.protocol_wire_count(cfg.protocol, d, n))
    return protocols.instance(cfg.protocol, d, n, cfg.seed)


def _run(cfg: RunConfig) -> int:
    if cfg.command == "build":
        _write(cfg.output, dumps(_instance(cfg).circuit))
        return EXIT_OK
    if cfg.command == "render":
        _write(cfg.output, render_text(_instance(cfg).circuit))
        return EXIT_OK
    if cfg.command == "verify":
        d, n = cfg.d[0], cfg.n[0]
        _instance(cfg)  # surface config errors as usage errors, not skipped reports
        report = run_protocol(cfg.protocol, d, n, cfg.seed, cfg.tol)
        status = "PASS" if report.passed else "FAIL"
        print(
            f"{status} {cfg.protocol} d={d} n={n} seed={cfg.seed} branches={report.branch_count} "
            f"max_dev={report.max_deviation:.3e} ledger={report.ledger}"
        )
        text = reports_to_csv([report]) if cfg.format == "csv" else reports_to_jsonl([report], cfg.timing)
        if cfg.output is not None:
            _write(cfg.output, text)
        return EXIT_OK if report.passed else EXIT_FAIL
    if cfg.command == "sweep":
        seeds = range(cfg.seed, cfg.seed + cfg.seeds)
        reports = sweep(cfg.protocol, cfg.d, cfg.n, seeds, cfg.tol, cfg.jobs)
        if cfg.format == "csv":
            text = reports_to_csv(reports)
        elif cfg.format == "json":
            text = reports_to_jsonl(reports, cfg.timing)
        else:
            text = "".join(
                f"{'PASS' if r.passed else ('SKIP' if r.skipped else 'FAIL')} "
                f"{r.protocol} d={r.d} n={r.n} seed={r.seed} branches={r.branch_count} "
                f"max_dev={r.max_deviation} {r.note}".rstrip() + "\n"
                for r in reports
            )
        _write(cfg.output, text)
        if cfg.output is not None:
            ok = sum(r.passed for r in reports)
            print(f"{ok}/{len(reports)} cells passed")
        return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    if cfg.command == "sample":
        inst = _instance(cfg)
        c = inst.circuit
        psi = random_state(c.d ** len(c.data_wires), cfg.seed + 1).amplitudes
        outcome, out = sample(c, psi, cfg.seed)
        fidelity = float(abs(np.vdot(inst.target @ psi, out.amplitudes)) ** 2)
        print(f"outcome={list(outcome)} fidelity={fidelity:.15f}")
        return EXIT_OK if fidelity >= 1 - cfg.tol else EXIT_FAIL
    raise ConfigError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = _config(args)
        return _run(cfg)
    except (ConfigError, DimensionError, ValueError, KeyError) as exc:
        print(f"ct-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SamplingError as exc:
        print(f"ct-sim: sampling failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"ct-sim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
