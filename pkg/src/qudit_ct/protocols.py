"""Compressed-teleportation circuits, their targets, and comparison protocols.

Wire layout of the CT circuits: ``[qL, gL, g1, x1..., g2, x2..., ...]`` where
``qL`` is the leader's data qudit, ``gL``/``gj`` are shares of the entangled
resource and ``xj`` are party j's data qudits. The data register is listed as
``qL, x_n..., ..., x_1...`` so Kraus operators come out in the factor order
``|l><l| (x) T_n(l) (x) ... (x) T_1(l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gates
from .circuit import (
    Circuit,
    CircuitBuilder,
    ClassicallyControlled,
    Exponent,
    PrepareResource,
    Unitary,
)
from .gates import controlled, dagger, fourier, named_gate, random_unitary
from .resources import ResourceClaim
from .tensor import ComplexMatrix, DimensionError, is_unitary, num_wires_for, permute_wires, tensor

KINDS = ("Z", "X", "Y")


class NotCompressedError(ValueError):
    """The operator is not compressed on the requested wire."""


# --- frames -----------------------------------------------------------------

# Time-ordered gate names whose product maps the Z-basis to the kind's eigenbasis:
# X-compressed = F T F^-1, Y-compressed = (G F) T (G F)^-1.
_FRAME_OPS = {"Z": (), "X": ("F",), "Y": ("F", "G")}


def _inverse_ops(ops: Sequence[str]) -> list[str]:
    out = []
    for name in reversed(ops):
        base, power = gates.parse_gate_name(name)
        out.append(gates.gate_name(base, -power))
    return out


def _cancel(ops: list[str]) -> list[str]:
    stack: list[str] = []
    for name in ops:
        if stack:
            b1, p1 = gates.parse_gate_name(stack[-1])
            b2, p2 = gates.parse_gate_name(name)
            if b1 == b2 and p1 == -p2:
                stack.pop()
                continue
        stack.append(name)
    return stack


def frame_matrix(kind: str, d: int) -> ComplexMatrix:
    if kind not in KINDS:
        raise ValueError(f"unknown compression kind {kind!r}")
    mat = np.eye(d, dtype=complex)
    for name in _FRAME_OPS[kind]:
        mat = named_gate(name, d) @ mat
    return mat


# --- compressed transformations ---------------------------------------------


def _control_to(wire: int, k: int) -> list[int]:
    # permutation moving wire 0 of a controlled() operator to position `wire`
    return [w + 1 if w < wire else (0 if w == wire else w) for w in range(k)]


@dataclass(frozen=True)
class CompressedTransformation:
    """``sum_l |l><l|_wire (x) blocks[l]`` seen in the Z, X or Y frame of ``wire``.

    ``kind="general"`` means ``U_wire . T . V_wire`` with T Z-compressed.
    """

    d: int
    wire: int
    blocks: tuple[np.ndarray, ...]
    kind: str = "Z"
    U: np.ndarray | None = None
    V: np.ndarray | None = None

    def __post_init__(self):
        blocks = tuple(np.asarray(b, dtype=complex) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if len(blocks) != self.d:
            raise ValueError(f"need {self.d} blocks, got {len(blocks)}")
        if self.kind not in KINDS + ("general",):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "general" and (self.U is None or self.V is None):
            raise ValueError("general compressed transformations need U and V")
        if not 0 <= self.wire < self.num_wires:
            raise ValueError(f"wire {self.wire} out of range")

    @property
    def num_wires(self) -> int:
        return 1 + num_wires_for(self.blocks[0].shape[0], self.d)

    def z_form(self) -> ComplexMatrix:
        return permute_wires(controlled(list(self.blocks)), _control_to(self.wire, self.num_wires), self.d)

    def _local(self, op: ComplexMatrix) -> ComplexMatrix:
        k, d = self.num_wires, self.d
        return tensor(np.eye(d**self.wire), op, np.eye(d ** (k - self.wire - 1)))

    def matrix(self) -> ComplexMatrix:
        t = self.z_form()
        if self.kind == "general":
            return self._local(self.U) @ t @ self._local(self.V)
        f = self._local(frame_matrix(self.kind, self.d))
        return f @ t @ dagger(f)

    @classmethod
    def from_matrix(
        cls, mat: ComplexMatrix, d: int, wire: int, kind: str = "Z", tol: float = 1e-10
    ) -> "CompressedTransformation":
        """Recover the blocks of an X/Y/Z-compressed operator, or raise."""
        mat = np.asarray(mat, dtype=complex)
        k = num_wires_for(mat.shape[0], d)
        if not 0 <= wire < k:
            raise ValueError(f"wire {wire} out of range for {k} wires")
        if kind not in KINDS:
            raise ValueError(f"cannot recognize kind {kind!r}")
        f = tensor(np.eye(d**wire), frame_matrix(kind, d), np.eye(d ** (k - wire - 1)))
        z = dagger(f) @ mat @ f
        # bring `wire` to the front, then read the diagonal blocks
        front = [wire] + [w for w in range(k) if w != wire]
        blocked = permute_wires(z, front, d).reshape(d, d ** (k - 1), d, d ** (k - 1))
        off = max(
            (float(np.max(np.abs(blocked[a, :, b, :]))) for a in range(d) for b in range(d) if a != b),
            default=0.0,
        )
        if off > tol:
            raise NotCompressedError(f"off-diagonal weight {off:.2e} on wire {wire} ({kind} frame)")
        return cls(d, wire, tuple(blocked[ell, :, ell, :].copy() for ell in range(d)), kind)


def is_compressed(mat: ComplexMatrix, d: int, wire: int, kind: str = "Z", tol: float = 1e-10) -> bool:
    try:
        CompressedTransformation.from_matrix(mat, d, wire, kind, tol)
    except NotCompressedError:
        return False
    return True


# --- networks and targets ----------------------------------------------------


@dataclass(frozen=True)
class NetworkSpec:
    """Leader plus n parties; ``blocks[j][l]`` is party j+1's transformation for control l."""

    d: int
    blocks: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(np.asarray(b, dtype=complex) for b in party) for party in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("need at least one party")
        for j, party in enumerate(blocks, 1):
            if len(party) != self.d:
                raise ValueError(f"party {j} has {len(party)} blocks, need {self.d}")
            shape = party[0].shape
            for b in party:
                if b.shape != shape:
                    raise DimensionError(f"party {j} block shapes differ")
                if not is_unitary(b, 1e-10):
                    raise ValueError(f"party {j} block is not unitary")
            num_wires_for(shape[0], self.d)

    @property
    def n(self) -> int:
        return len(self.blocks)

    def party_wires(self, j: int) -> int:
        """Data qudits of party j (1-based)."""
        return num_wires_for(self.blocks[j - 1][0].shape[0], self.d)

    @classmethod
    def random(cls, d: int, n: int, seed: int, party_wires: int = 1) -> "NetworkSpec":
        seeds = np.random.SeedSequence(seed).generate_state(n * d)
        dim = d**party_wires
        return cls(
            d,
            tuple(
                tuple(random_unitary(dim, int(seeds[j * d + ell])) for ell in range(d))
                for j in range(n)
            ),
        )


def target_tc(net: NetworkSpec) -> ComplexMatrix:
    """``sum_l |l><l| (x) T_n(l) (x) ... (x) T_1(l)``."""
    return controlled(
        [tensor(*(net.blocks[j][ell] for j in reversed(range(net.n)))) for ell in range(net.d)]
    )


def target_x(net: NetworkSpec) -> ComplexMatrix:
    """The X-compressed target: ``target_tc`` conjugated by F on the leader qudit."""
    f = tensor(fourier(net.d), np.eye(target_tc(net).shape[0] // net.d))
    return f @ target_tc(net) @ dagger(f)


def conjugated_target(target: ComplexMatrix, d: int, from_kind: str, to_kind: str, wire: int = 0) -> ComplexMatrix:
    k = num_wires_for(target.shape[0], d)
    m = frame_matrix(to_kind, d) @ dagger(frame_matrix(from_kind, d))
    m = tensor(np.eye(d**wire), m, np.eye(d ** (k - wire - 1)))
    return m @ target @ dagger(m)


# --- circuit builders -------------------------------------------------------


@dataclass
class _Party:
    share: str
    data: list[str]
    gate: np.ndarray
    name: str
    outcome: str


def _emit_ct_controlled(
    b: CircuitBuilder, leader: str, lshare: str, mL: str, parties: list[_Party]
) -> None:
    """Z-frame CT: GHZ shares, leader disentangles, parties apply controlled blocks."""
    d = b.d
    b.prep(gates.ghz_state(d, 1 + len(parties)).amplitudes, [lshare] + [p.share for p in parties], "ghz")
    b.u("F^-1", lshare)
    b.u("CZ", [lshare, leader])
    b.u("F^-1", lshare)
    b.measure(lshare, mL)
    for p in parties:
        b.cgate("X", p.share, Exponent(0, ((mL, 1),)))
        b.u(p.gate, [p.share] + p.data, p.name)
        b.u("F^-1", p.share)
        b.measure(p.share, p.outcome)
    b.cgate("Z", leader, Exponent(0, tuple((p.outcome, 1) for p in parties)))


def _emit_ct_x(
    b: CircuitBuilder, leader: str, lshare: str, mL: str, parties: list[_Party], simplified: bool
) -> None:
    """X-frame CT on a Max resource; ``simplified`` drops the controlled-X^-1 / X^mL pair."""
    d = b.d
    b.prep(gates.max_state(d, 1 + len(parties)).amplitudes, [lshare] + [p.share for p in parties], "max")
    b.u("CX", [lshare, leader])
    b.u("F^-1", lshare)
    if not simplified:
        b.u("CX^-1", [lshare, leader])
    b.measure(lshare, mL)
    for p in parties:
        b.cgate("Z^-1", p.share, Exponent(0, ((mL, 1),)))
        b.u(p.gate, [p.share] + p.data, p.name)
        b.measure(p.share, p.outcome)
    terms = (() if simplified else ((mL, 1),)) + tuple((p.outcome, 1) for p in parties)
    b.cgate("X", leader, Exponent(0, terms))


def _network_layout(net: NetworkSpec) -> tuple[CircuitBuilder, list[_Party], list[str]]:
    d = net.d
    b = CircuitBuilder(d)
    b.wire("qL", "Leader")
    b.wire("gL", "Leader")
    parties = []
    for j in range(1, net.n + 1):
        owner = f"P{j}"
        share = b.wire(f"g{j}", owner)
        k = net.party_wires(j)
        data = [b.wire(f"x{j}" if k == 1 else f"x{j}_{i}", owner) for i in range(k)]
        parties.append(_Party(share, data, controlled(list(net.blocks[j - 1])), f"T{j}", f"l{j}"))
    data_order = ["qL"] + [w for p in reversed(parties) for w in p.data]
    return b, parties, data_order


def build_ct_controlled(net: NetworkSpec) -> Circuit:
    b, parties, data = _network_layout(net)
    _emit_ct_controlled(b, "qL", "gL", "mL", parties)
    return b.build(data, name="ct-controlled")


def build_ct_x_compressed(net: NetworkSpec, simplified: bool = False) -> Circuit:
    b, parties, data = _network_layout(net)
    f = fourier(net.d)
    for p in parties:
        # party gate is X-compressed on its share: F (sum_s |s><s| (x) T(s)) F^-1
        frame = tensor(f, np.eye(p.gate.shape[0] // net.d))
        p.gate = frame @ p.gate @ dagger(frame)
    _emit_ct_x(b, "qL", "gL", "mL", parties, simplified)
    return b.build(data, name="ct-x-simplified" if simplified else "ct-x")


def _apply_ops(d: int, ops: Sequence[str]) -> np.ndarray:
    mat = np.eye(d, dtype=complex)
    for name in ops:
        mat = named_gate(name, d) @ mat
    return mat


def conjugate_variant(c: Circuit, from_kind: str, to_kind: str, wire: int | None = None) -> Circuit:
    """Move a CT circuit between the X, Y and Z frames of the leader qudit.

    The new circuit starts with M^-1 and ends with M on ``wire`` (default: the
    first data wire), where M maps the old frame to the new one; M is pushed
    in front of the trailing classically-controlled corrections on that wire,
    whose base gates are conjugated (an X correction becomes a Z^-1 one under
    F^-1, stored as Z with a rescaled exponent).
    """
    if from_kind not in KINDS or to_kind not in KINDS:
        raise ValueError(f"unsupported kind pair {from_kind}->{to_kind}")
    if from_kind == to_kind:
        return c
    d = c.d
    wire = c.data_wires[0] if wire is None else wire
    m_ops = _cancel(_inverse_ops(_FRAME_OPS[from_kind]) + list(_FRAME_OPS[to_kind]))
    m_inv_ops = _inverse_ops(m_ops)
    m = _apply_ops(d, m_ops)

    body = list(c.instructions)
    tail: list[ClassicallyControlled] = []
    while body and isinstance(body[-1], ClassicallyControlled) and body[-1].targets == (wire,):
        tail.insert(0, body.pop())

    new_tail = []
    for ins in tail:
        base = m @ ins.gate @ dagger(m)
        exponent = ins.exponent
        name = gates.identify_pauli_power(base, d)
        if name is not None:
            # P^k raised to e is P raised to k*e
            name, power = gates.parse_gate_name(name)
            exponent = exponent.scaled(power).normalized(d)
            base = named_gate(name, d)
        new_tail.append(ClassicallyControlled(base, (wire,), exponent, name))

    pre = [Unitary(named_gate(g, d), (wire,), g) for g in m_inv_ops]
    post = [Unitary(named_gate(g, d), (wire,), g) for g in m_ops]
    # resources must stay on untouched wires, so M^-1 goes right after the preparations
    lead = 0
    while lead < len(body) and isinstance(body[lead], PrepareResource):
        lead += 1
    instructions = body[:lead] + pre + body[lead:] + post + new_tail
    out = c.replace_instructions(instructions)
    return Circuit(out.system, out.data_wires, out.instructions, out.output_wires, f"{c.name}:{from_kind}->{to_kind}")


def two_person_teleport(gate: CompressedTransformation) -> Circuit:
    """Bob (leader) holds the compressed qudit; Alice (P1) performs the gate."""
    if not isinstance(gate, CompressedTransformation):
        raise NotCompressedError("two_person_teleport needs a CompressedTransformation")
    d, k = gate.d, gate.num_wires
    b = CircuitBuilder(d)
    bob = b.wire("qB", "Leader")
    b.wire("gB", "Leader")
    share = b.wire("gA", "P1")
    alice = [b.wire(f"xA{i}", "P1") for i in range(k - 1)]
    party = _Party(share, alice, controlled(list(gate.blocks)), "T", "lA")
    _emit_ct_controlled(b, bob, "gB", "mB", [party])
    data = alice[: gate.wire] + [bob] + alice[gate.wire:]
    c = b.build(data, name="two-person")
    if gate.kind in ("X", "Y"):
        c = conjugate_variant(c, "Z", gate.kind, wire=0)
    elif gate.kind == "general":
        ins = list(c.instructions)
        ins.insert(1, Unitary(gate.V, (0,), "V"))
        ins.append(Unitary(gate.U, (0,), "U"))
        c = c.replace_instructions(ins)
    return c


def demo_toffoli() -> Circuit:
    """Toffoli as a gate controlled by qubit 0 with blocks (I, CNOT)."""
    cnot = named_gate("CX", 2)
    c = two_person_teleport(CompressedTransformation(2, 0, (np.eye(4), cnot)))
    return Circuit(c.system, c.data_wires, c.instructions, c.output_wires, "toffoli")


def toffoli_matrix() -> ComplexMatrix:
    return controlled([np.eye(4), named_gate("CX", 2)])


def swap_matrix(d: int) -> ComplexMatrix:
    s = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for c in range(d):
            s[c * d + a, a * d + c] = 1.0
    return s


def demo_swap(d: int = 2) -> Circuit:
    """SWAP of Alice's and Bob's qudits from three teleported controlled shifts.

    ``|a,b> -> CX(a->b) -> CX^-1(b->a) -> CX(a->b) -> |-b, a>``, then a local
    ``F^2`` (index negation) on Alice's qudit. For d = 2 the negation is trivial
    and is omitted.
    """
    b = CircuitBuilder(d)
    alice = b.wire("a", "Leader")
    bob = b.wire("b", "P1")
    x = gates.pauli_x(d)
    rounds = [(alice, bob, 1), (bob, alice, -1), (alice, bob, 1)]
    owners = {alice: "Leader", bob: "P1"}
    for r, (ctrl, tgt, sign) in enumerate(rounds, 1):
        lshare = b.wire(f"s{r}{ctrl}", owners[ctrl])
        pshare = b.wire(f"s{r}{tgt}", owners[tgt])
        blocks = [gates.mpow(x, sign * ell) for ell in range(d)]
        party = _Party(pshare, [tgt], controlled(blocks), gates.gate_name("CX", sign), f"l{r}")
        _emit_ct_controlled(b, ctrl, lshare, f"m{r}", [party])
    if d > 2:
        b.u("F^2", alice)
    return b.build([alice, bob], name="swap")


def _emit_teleport(b: CircuitBuilder, src: str, share_src: str, dst: str, tag: str) -> None:
    """Standard qudit teleportation of ``src`` onto ``dst`` through ``(share_src, dst)``."""
    d = b.d
    b.prep(gates.ghz_state(d, 2).amplitudes, [share_src, dst], "ghz")
    b.u("CX^-1", [src, share_src])
    b.u("F", src)
    b.measure(share_src, f"m{tag}")
    b.measure(src, f"j{tag}")
    b.cgate("X", dst, Exponent(0, ((f"m{tag}", -1),)))
    b.cgate("Z", dst, Exponent(0, ((f"j{tag}", -1),)))


def teleportation(d: int = 2) -> Circuit:
    b = CircuitBuilder(d)
    b.wire("q", "Leader")
    b.wire("s", "Leader")
    b.wire("t", "P1")
    _emit_teleport(b, "q", "s", "t", "")
    return b.build(["q"], ["t"], name="teleport")


def baseline_bidirectional(gate: ComplexMatrix, d: int) -> Circuit:
    """Teleport Bob's qudit to Alice, apply ``gate`` there, teleport it back.

    ``gate`` acts on Bob's qudit first, then on any further qudits Alice
    already holds.
    """
    gate = np.asarray(gate, dtype=complex)
    k = num_wires_for(gate.shape[0], d)
    if k < 1:
        raise DimensionError("gate must act on at least one qudit")
    b = CircuitBuilder(d)
    q = b.wire("qB", "Leader")
    sb = b.wire("sB", "Leader")
    a = b.wire("a", "P1")
    extra = [b.wire(f"xA{i}", "P1") for i in range(k - 1)]
    sa = b.wire("sA", "P1")
    out = b.wire("qB2", "Leader")
    _emit_teleport(b, q, sb, a, "1")
    b.u(gate, [a] + extra, "W")
    _emit_teleport(b, a, sa, out, "2")
    return b.build([q] + extra, [out] + extra, name="baseline-bidir")


# --- registry ---------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolInstance:
    circuit: Circuit
    target: ComplexMatrix
    claim: ResourceClaim


def _ct_controlled(d: int, n: int, seed: int) -> ProtocolInstance:
    net = NetworkSpec.random(d, n, seed)
    return ProtocolInstance(build_ct_controlled(net), target_tc(net), ResourceClaim(1, 2 * n, 2))


def _ct_x(simplified: bool) -> Callable[[int, int, int], ProtocolInstance]:
    def make(d: int, n: int, seed: int) -> ProtocolInstance:
        net = NetworkSpec.random(d, n, seed)
        return ProtocolInstance(
            build_ct_x_compressed(net, simplified), target_x(net), ResourceClaim(1, 2 * n, 2)
        )

    return make


def _two_person(d: int, n: int, seed: int) -> ProtocolInstance:
    net = NetworkSpec.random(d, 1, seed)
    gate = CompressedTransformation(d, 0, net.blocks[0])
    return ProtocolInstance(two_person_teleport(gate), gate.matrix(), ResourceClaim(1, 2, 2))


def _swap(d: int, n: int, seed: int) -> ProtocolInstance:
    return ProtocolInstance(demo_swap(d), swap_matrix(d), ResourceClaim(3, 6, None))


def _toffoli(d: int, n: int, seed: int) -> ProtocolInstance:
    if d != 2:
        raise ValueError("the Toffoli demonstration is defined for d = 2 only")
    return ProtocolInstance(demo_toffoli(), toffoli_matrix(), ResourceClaim(1, 2, 2))


def _baseline(d: int, n: int, seed: int) -> ProtocolInstance:
    gate = random_unitary(d, seed)
    return ProtocolInstance(baseline_bidirectional(gate, d), gate, ResourceClaim(2, 4, 2))


PROTOCOLS: dict[str, Callable[[int, int, int], ProtocolInstance]] = {
    "ct-controlled": _ct_controlled,
    "ct-x": _ct_x(False),
    "ct-x-simplified": _ct_x(True),
    "two-person": _two_person,
    "swap": _swap,
    "toffoli": _toffoli,
    "baseline-bidir": _baseline,
}

# protocols whose size depends on n; the rest ignore it
N_DEPENDENT = {"ct-controlled", "ct-x", "ct-x-simplified"}


def instance(name: str, d: int, n: int = 1, seed: int = 0) -> ProtocolInstance:
    try:
        make = PROTOCOLS[name]
    except KeyError:
        raise KeyError(f"unknown protocol {name!r}; choose from {sorted(PROTOCOLS)}") from None
    return make(d, n, seed)


def protocol_wire_count(name: str, d: int, n: int) -> int:
    """Register size the named protocol would allocate (for cap checks before building)."""
    if name in N_DEPENDENT:
        return 2 + 2 * n
    return {"two-person": 4, "swap": 8, "toffoli": 5, "baseline-bidir": 5}[name]
