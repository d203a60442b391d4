"""Resource ledgers of compressed teleportation against the bidirectional baseline."""

from __future__ import annotations

import argparse

from qudit_ct import protocols
from qudit_ct.resources import ledger
from qudit_ct.verify import edit_saving


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--max-n", type=int, default=4)
    args = p.parse_args()

    print(f"{'circuit':<22} {'edits':>5} {'cdits':>5} {'broadcast cdits':>15} {'rounds':>6}")
    for n in range(1, args.max_n + 1):
        c = protocols.build_ct_controlled(protocols.NetworkSpec.random(args.d, n, 0))
        led, bc = ledger(c), ledger(c, broadcast=True)
        print(f"{'ct-controlled n=' + str(n):<22} {led.edits:>5} {led.total_cdits:>5} {bc.total_cdits:>15} {led.rounds:>6}")

    ct = protocols.instance("two-person", args.d).circuit
    base = protocols.instance("baseline-bidir", args.d).circuit
    for name, c in (("two-person", ct), ("baseline-bidir", base)):
        led, bc = ledger(c), ledger(c, broadcast=True)
        print(f"{name:<22} {led.edits:>5} {led.total_cdits:>5} {bc.total_cdits:>15} {led.rounds:>6}")

    r = edit_saving(ct, base)
    print(
        f"\ntwo-person vs baseline: edits x{r['edits_ratio']:.2f}, cdits x{r['cdits_ratio']:.2f}, "
        f"edit saving {r['edit_saving_percent']:.0f}%"
    )


if __name__ == "__main__":
    main()
