"""Branch-wise channel equivalence, resource-claim checks, and parameter sweeps."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import protocols
from .circuit import Circuit
from .resources import ResourceClaim, ledger
from .simulate import BranchDecomposition, enumerate_branches
from .tensor import ComplexMatrix, DimensionError, aligned_deviation, check_cap

DEFAULT_TOL = 1e-9
CSV_FIELDS = ("protocol", "d", "n", "seed", "branches", "max_dev", "pass")


@dataclass
class VerificationReport:
    protocol: str
    d: int
    n: int
    seed: int
    branch_count: int = 0
    max_deviation: float | None = None
    weight_sum_error: float | None = None
    phases: list[float] = field(default_factory=list)
    ledger: dict = field(default_factory=dict)
    ledger_mismatches: list[str] = field(default_factory=list)
    passed: bool = False
    skipped: bool = False
    note: str = ""
    wall_time: float = 0.0

    def to_json(self, timing: bool = False) -> str:
        data = asdict(self)
        if not timing:
            del data["wall_time"]
        return json.dumps(data, sort_keys=False)

    def csv_row(self) -> dict:
        return {
            "protocol": self.protocol,
            "d": self.d,
            "n": self.n,
            "seed": self.seed,
            "branches": self.branch_count,
            "max_dev": "" if self.max_deviation is None else repr(self.max_deviation),
            "pass": str(self.passed).lower(),
        }


def compare_branches(bd: BranchDecomposition, target: ComplexMatrix) -> tuple[float, list[float]]:
    """Worst phase-aligned max-norm deviation of ``K_b * sqrt(#branches)`` from target."""
    scale = np.sqrt(len(bd))
    worst, phases = 0.0, []
    for _, branch in bd:
        dev, theta = aligned_deviation(branch.kraus * scale, target)
        worst = max(worst, dev)
        phases.append(theta)
    return worst, phases


def verify(
    c: Circuit,
    target: ComplexMatrix,
    tol: float = DEFAULT_TOL,
    claim: ResourceClaim | None = None,
    *,
    protocol: str | None = None,
    n: int = 0,
    seed: int = 0,
) -> VerificationReport:
    """Check every branch Kraus K_b against ``target``.

    Each ``K_b * sqrt(branch count)`` must equal ``target`` up to a global
    phase (aligned on the target's largest entry) within ``tol`` in max-norm;
    magnitudes are not refit. Weights must sum to 1 within ``tol``.
    """
    start = time.perf_counter()
    target = np.asarray(target, dtype=complex)
    data_in = c.d ** len(c.data_wires)
    data_out = c.d ** len(c.output_wires)
    if target.shape != (data_out, data_in):
        raise DimensionError(f"target shape {target.shape} vs data register {(data_out, data_in)}")

    bd = enumerate_branches(c)
    worst, phases = compare_branches(bd, target)
    led = ledger(c)
    mismatches = claim.mismatches(led) if claim is not None else []
    wse = abs(bd.weight_sum - 1.0)
    return VerificationReport(
        protocol=protocol or c.name,
        d=c.d,
        n=n,
        seed=seed,
        branch_count=len(bd),
        max_deviation=worst,
        weight_sum_error=wse,
        phases=phases,
        ledger=led.to_dict(),
        ledger_mismatches=mismatches,
        passed=worst <= tol and wse <= tol and not mismatches,
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class ClaimCheck:
    passed: bool
    mismatches: list[str]
    ledger: dict


def verify_resource_claims(c: Circuit, expected: ResourceClaim) -> ClaimCheck:
    led = ledger(c)
    bad = expected.mismatches(led)
    return ClaimCheck(not bad, bad, led.to_dict())


def edit_saving(ct: Circuit, baseline: Circuit) -> dict:
    """Resource ratios of a CT circuit against the bidirectional baseline."""
    a, b = ledger(ct), ledger(baseline)
    return {
        "edits_ratio": a.edits / b.edits,
        "cdits_ratio": a.total_cdits / b.total_cdits,
        "edit_saving_percent": 100.0 * (1 - a.edits / b.edits),
    }


def run_protocol(name: str, d: int, n: int, seed: int, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Build and verify one named protocol; cap violations become skipped reports."""
    try:
        check_cap(d, protocols.protocol_wire_count(name, d, n))
        inst = protocols.instance(name, d, n, seed)
    except (DimensionError, ValueError) as exc:
        return VerificationReport(name, d, n, seed, skipped=True, note=f"skipped: {exc}")
    return verify(inst.circuit, inst.target, tol, inst.claim, protocol=name, n=n, seed=seed)


def sweep(
    protocol: str,
    d_list: Sequence[int],
    n_list: Sequence[int],
    seeds: Iterable[int],
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> list[VerificationReport]:
    """Every (d, n, seed) cell in order; failures and skips are collected, never raised."""
    if protocol not in protocols.PROTOCOLS:
        raise KeyError(f"unknown protocol {protocol!r}")
    cells = [(d, n, s) for d in d_list for n in n_list for s in seeds]
    if jobs <= 1 or len(cells) <= 1:
        return [run_protocol(protocol, d, n, s, tol) for d, n, s in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda cell: run_protocol(protocol, *cell, tol), cells))


def reports_to_jsonl(reports: Iterable[VerificationReport], timing: bool = False) -> str:
    return "".join(r.to_json(timing) + "\n" for r in reports)


def reports_to_csv(reports: Iterable[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
