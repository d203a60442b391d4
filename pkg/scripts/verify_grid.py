"""Verify every registered protocol over a (d, n, seed) grid and print a table.

    python scripts/verify_grid.py --d 2,3,5 --n 1,2 --seeds 5
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from qudit_ct import protocols
from qudit_ct.verify import sweep


@dataclass
class GridConfig:
    d: tuple[int, ...] = (2, 3, 5)
    n: tuple[int, ...] = (1, 2)
    seeds: int = 5
    tol: float = 1e-9
    jobs: int = 4


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--d", type=_ints, default=GridConfig.d)
    p.add_argument("--n", type=_ints, default=GridConfig.n)
    p.add_argument("--seeds", type=int, default=GridConfig.seeds)
    p.add_argument("--tol", type=float, default=GridConfig.tol)
    p.add_argument("--jobs", type=int, default=GridConfig.jobs)
    cfg = GridConfig(**vars(p.parse_args()))

    print(f"{'protocol':<16} {'cells':>5} {'pass':>5} {'skip':>5} {'worst dev':>10} {'secs':>6}")
    for name in protocols.PROTOCOLS:
        # protocols of fixed size ignore n, so one value is enough
        n_list = cfg.n if name in protocols.N_DEPENDENT else cfg.n[:1]
        start = time.perf_counter()
        reports = sweep(name, cfg.d, n_list, range(cfg.seeds), cfg.tol, cfg.jobs)
        ran = [r for r in reports if not r.skipped]
        worst = max((r.max_deviation for r in ran), default=float("nan"))
        print(
            f"{name:<16} {len(reports):>5} {sum(r.passed for r in reports):>5} "
            f"{len(reports) - len(ran):>5} {worst:>10.2e} {time.perf_counter() - start:>6.2f}"
        )


if __name__ == "__main__":
    main()
