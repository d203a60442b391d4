"""Entanglement and classical-communication accounting for a circuit."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .circuit import Circuit, ClassicallyControlled, Measure, PrepareResource, Unitary


@dataclass(frozen=True)
class ResourceLedger:
    """What a protocol consumes.

    ``edits`` counts entangled resource states (a ``PrepareResource`` whose
    wires span two or more parties); ``shares`` lists how many parties hold
    each of them. ``cdits`` maps (sender, receiver) to messages sent, one per
    classical wire per distinct receiving party. ``rounds`` is the longest
    causal chain of cross-party messages.
    """

    edits: int = 0
    shares: tuple[int, ...] = ()
    cdits: dict[tuple[str, str], int] = field(default_factory=dict)
    rounds: int = 0

    def __post_init__(self):
        if self.edits < 0 or self.rounds < 0 or any(v < 0 for v in self.cdits.values()):
            raise ValueError("resource counts must be nonnegative")

    @property
    def total_cdits(self) -> int:
        return sum(self.cdits.values())

    def to_dict(self) -> dict:
        return {
            "edits": self.edits,
            "shares": list(self.shares),
            "cdits": {f"{a}->{b}": n for (a, b), n in sorted(self.cdits.items())},
            "total_cdits": self.total_cdits,
            "rounds": self.rounds,
        }


@dataclass(frozen=True)
class ResourceClaim:
    """Expected resource usage; ``None`` fields are not checked."""

    edits: int | None = None
    total_cdits: int | None = None
    rounds: int | None = None

    def mismatches(self, actual: ResourceLedger) -> list[str]:
        out = []
        for name in ("edits", "total_cdits", "rounds"):
            want = getattr(self, name)
            got = getattr(actual, name)
            if want is not None and want != got:
                out.append(f"{name}: expected {want}, got {got}")
        return out


def ledger(c: Circuit, broadcast: bool = False) -> ResourceLedger:
    """Count resources used by ``c``.

    By default a classical wire read by k other parties costs k cdits. With
    ``broadcast=True`` it costs one, sent to the pseudo-receiver ``"*"``.
    """
    sys = c.system
    owner = sys.owner
    edits = 0
    shares = []
    messages: set[tuple[str, str]] = set()  # (cwire, receiver)
    sender: dict[str, str] = {}

    # round depth of each quantum / classical wire's causal past
    level = [0] * sys.num_wires
    clevel: dict[str, int] = {}

    for ins in c.instructions:
        if isinstance(ins, PrepareResource):
            parties = {owner(t) for t in ins.targets}
            if len(parties) >= 2:
                edits += 1
                shares.append(len(parties))
            for t in ins.targets:
                level[t] = 0
        elif isinstance(ins, Measure):
            sender[ins.result] = owner(ins.target)
            clevel[ins.result] = level[ins.target]
        elif isinstance(ins, Unitary):
            top = max(level[t] for t in ins.targets)
            for t in ins.targets:
                level[t] = top
        elif isinstance(ins, ClassicallyControlled):
            receivers = {owner(t) for t in ins.targets}
            top = max(level[t] for t in ins.targets)
            for w in ins.exponent.cwires:
                for r in receivers:
                    cross = r != sender[w]
                    if cross:
                        messages.add((w, "*" if broadcast else r))
                    top = max(top, clevel[w] + int(cross))
            for t in ins.targets:
                level[t] = top

    cdits = Counter((sender[w], r) for w, r in sorted(messages))
    rounds = max(level + list(clevel.values()), default=0)
    return ResourceLedger(edits, tuple(shares), dict(cdits), rounds)
