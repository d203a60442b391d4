"""Monte Carlo run of a CT circuit: outcome histogram and output fidelities."""

from __future__ import annotations

import argparse
import itertools

import numpy as np

from qudit_ct import protocols
from qudit_ct.gates import random_state
from qudit_ct.simulate import sample


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--runs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    net = protocols.NetworkSpec.random(args.d, args.n, args.seed)
    c = protocols.build_ct_controlled(net)
    target = protocols.target_tc(net)
    dim = args.d ** (args.n + 1)
    counts = dict.fromkeys(itertools.product(range(args.d), repeat=args.n + 1), 0)
    fids = np.empty(args.runs)
    for s in range(args.runs):
        psi = random_state(dim, args.seed + s).amplitudes
        outcome, out = sample(c, psi, args.seed + s)
        counts[outcome] += 1
        fids[s] = abs(np.vdot(target @ psi, out.amplitudes)) ** 2

    p_each = 1 / len(counts)
    sigma = np.sqrt(args.runs * p_each * (1 - p_each))
    for outcome, k in counts.items():
        print(f"{outcome}: {k:6d}  z={(k - args.runs * p_each) / sigma:+.2f}")
    print(f"fidelity: min {fids.min():.15f}  mean {fids.mean():.15f}")


if __name__ == "__main__":
    main()
