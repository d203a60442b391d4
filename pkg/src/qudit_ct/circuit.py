"""Circuit IR over qudit and classical wires, with a line-oriented file format.

File format (UTF-8, one statement per line, ``#`` starts a comment)::

    system d=2 wires=qL:Leader,gL:Leader,g1:P1,x1:P1
    data qL,x1                      # data-in wires, in Kraus index order
    output qL,x1                    # data-out wires (defaults to data)
    matrix m0 2 2 0.0,0.0;1.0,0.0;1.0,0.0;0.0,0.0
    prep ghz gL,g1
    u F^-1 gL
    u @m0 x1
    meas gL -> mL
    cgate X g1 exp=0+1*mL

``prep`` takes ``ghz``, ``max``, or inline ``[re,im;re,im;...]`` amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import gates
from .tensor import ComplexMatrix, DimensionError, QuditSystem, Wire, check_cap


class CircuitError(ValueError):
    """Malformed circuit: bad wire use, classical read-before-write, etc."""


@dataclass(frozen=True)
class Exponent:
    """Affine exponent ``const + sum(coef * outcome[cwire])`` evaluated mod d."""

    const: int = 0
    terms: tuple[tuple[str, int], ...] = ()

    def evaluate(self, outcomes: dict[str, int], d: int) -> int:
        return (self.const + sum(c * outcomes[w] for w, c in self.terms)) % d

    @property
    def cwires(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.terms)

    def shifted(self, delta: int) -> "Exponent":
        return Exponent(self.const + delta, self.terms)

    def scaled(self, k: int) -> "Exponent":
        return Exponent(k * self.const, tuple((w, k * c) for w, c in self.terms))

    def normalized(self, d: int) -> "Exponent":
        return Exponent(self.const % d, tuple((w, c % d) for w, c in self.terms))

    def to_text(self) -> str:
        return "+".join([str(self.const)] + [f"{c}*{w}" for w, c in self.terms])

    @classmethod
    def from_text(cls, text: str) -> "Exponent":
        parts = text.split("+")
        try:
            const = int(parts[0])
            terms = []
            for p in parts[1:]:
                coef, wire = p.split("*", 1)
                terms.append((wire, int(coef)))
        except ValueError as exc:
            raise CircuitError(f"bad exponent {text!r}") from exc
        return cls(const, tuple(terms))


def _mat_eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.array_equal(a, b))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Unitary:
    gate: np.ndarray
    targets: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gate", _frozen(self.gate))
        object.__setattr__(self, "targets", tuple(self.targets))

    def __eq__(self, other):
        return (
            isinstance(other, Unitary)
            and self.targets == other.targets
            and self.name == other.name
            and _mat_eq(self.gate, other.gate)
        )


@dataclass(frozen=True)
class Measure:
    target: int
    result: str


@dataclass(frozen=True, eq=False)
class ClassicallyControlled:
    gate: np.ndarray
    targets: tuple[int, ...]
    exponent: Exponent
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gate", _frozen(self.gate))
        object.__setattr__(self, "targets", tuple(self.targets))

    def __eq__(self, other):
        return (
            isinstance(other, ClassicallyControlled)
            and self.targets == other.targets
            and self.exponent == other.exponent
            and self.name == other.name
            and _mat_eq(self.gate, other.gate)
        )


@dataclass(frozen=True, eq=False)
class PrepareResource:
    state: np.ndarray
    targets: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "state", _frozen(np.asarray(self.state).reshape(-1)))
        object.__setattr__(self, "targets", tuple(self.targets))

    def __eq__(self, other):
        return (
            isinstance(other, PrepareResource)
            and self.targets == other.targets
            and self.name == other.name
            and _mat_eq(self.state, other.state)
        )


Instruction = Union[Unitary, Measure, ClassicallyControlled, PrepareResource]


@dataclass(frozen=True)
class Circuit:
    """Immutable instruction list over a :class:`QuditSystem`.

    ``data_wires`` are the open inputs, listed in the order that indexes the
    Kraus operators' columns; ``output_wires`` index the rows (teleportation
    moves data onto different wires). All other wires are ancillas starting
    in |0> unless a ``PrepareResource`` initializes them.
    """

    system: QuditSystem
    data_wires: tuple[int, ...]
    instructions: tuple[Instruction, ...]
    output_wires: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "data_wires", tuple(self.data_wires))
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.output_wires is None:
            object.__setattr__(self, "output_wires", self.data_wires)
        else:
            object.__setattr__(self, "output_wires", tuple(self.output_wires))
        validate(self)

    @property
    def d(self) -> int:
        return self.system.d

    @property
    def ancilla_wires(self) -> tuple[int, ...]:
        data = set(self.data_wires)
        return tuple(w for w in range(self.system.num_wires) if w not in data)

    @property
    def measurements(self) -> tuple[Measure, ...]:
        return tuple(i for i in self.instructions if isinstance(i, Measure))

    @property
    def classical_wires(self) -> tuple[str, ...]:
        return tuple(m.result for m in self.measurements)

    def classical_owner(self, cwire: str) -> str:
        for m in self.measurements:
            if m.result == cwire:
                return self.system.owner(m.target)
        raise KeyError(cwire)

    def replace_instructions(self, instructions: Sequence[Instruction]) -> "Circuit":
        return Circuit(self.system, self.data_wires, tuple(instructions), self.output_wires, self.name)


def _targets_of(ins: Instruction) -> tuple[int, ...]:
    return (ins.target,) if isinstance(ins, Measure) else ins.targets


def validate(c: Circuit) -> None:
    sys = c.system
    m, d = sys.num_wires, sys.d
    check_cap(d, m)
    for group, what in ((c.data_wires, "data"), (c.output_wires, "output")):
        if len(set(group)) != len(group):
            raise CircuitError(f"duplicate {what} wire")
        for w in group:
            if not 0 <= w < m:
                raise CircuitError(f"{what} wire {w} out of range")
    if len(c.data_wires) != len(c.output_wires):
        raise CircuitError("data and output registers must have the same size")

    written: set[str] = set()
    measured: set[int] = set()
    touched: set[int] = set(c.data_wires)
    for pos, ins in enumerate(c.instructions):
        targets = _targets_of(ins)
        for t in targets:
            if not 0 <= t < m:
                raise CircuitError(f"instruction {pos}: wire {t} out of range")
            if t in measured:
                raise CircuitError(f"instruction {pos}: wire {sys.wires[t].label} used after measurement")
        if len(set(targets)) != len(targets):
            raise CircuitError(f"instruction {pos}: duplicate target wire")
        if isinstance(ins, (Unitary, ClassicallyControlled)):
            if ins.gate.shape != (d ** len(targets),) * 2:
                raise DimensionError(f"instruction {pos}: gate shape {ins.gate.shape} vs {len(targets)} wires")
        if isinstance(ins, ClassicallyControlled):
            for w in ins.exponent.cwires:
                if w not in written:
                    raise CircuitError(f"instruction {pos}: classical wire {w!r} read before write")
        if isinstance(ins, PrepareResource):
            if ins.state.shape != (d ** len(targets),):
                raise DimensionError(f"instruction {pos}: state size {ins.state.shape[0]} vs {len(targets)} wires")
            for t in targets:
                if t in touched:
                    raise CircuitError(f"instruction {pos}: resource prepared on used wire {sys.wires[t].label}")
        if isinstance(ins, Measure):
            if ins.result in written:
                raise CircuitError(f"classical wire {ins.result!r} written twice")
            written.add(ins.result)
            measured.add(ins.target)
        touched.update(targets)
    for w in c.output_wires:
        if w in measured:
            raise CircuitError(f"output wire {sys.wires[w].label} is measured")


class CircuitBuilder:
    """Mutable helper for assembling a :class:`Circuit` by wire label."""

    def __init__(self, d: int):
        self.d = d
        self.wires: list[Wire] = []
        self.instructions: list[Instruction] = []

    def wire(self, label: str, owner: str) -> str:
        self.wires.append(Wire(label, owner))
        return label

    def _idx(self, labels: Sequence[str] | str) -> tuple[int, ...]:
        if isinstance(labels, str):
            labels = [labels]
        lookup = {w.label: i for i, w in enumerate(self.wires)}
        return tuple(lookup[lab] for lab in labels)

    def _gate(self, gate: str | ComplexMatrix) -> tuple[np.ndarray, str | None]:
        if isinstance(gate, str):
            return gates.named_gate(gate, self.d), gate
        return np.asarray(gate, dtype=complex), None

    def u(self, gate: str | ComplexMatrix, wires, name: str | None = None) -> None:
        mat, gname = self._gate(gate)
        self.instructions.append(Unitary(mat, self._idx(wires), name or gname))

    def measure(self, wire: str, result: str) -> None:
        (t,) = self._idx(wire)
        self.instructions.append(Measure(t, result))

    def cgate(self, gate: str | ComplexMatrix, wires, exponent: Exponent) -> None:
        mat, gname = self._gate(gate)
        self.instructions.append(ClassicallyControlled(mat, self._idx(wires), exponent, gname))

    def prep(self, state, wires, name: str | None = None) -> None:
        self.instructions.append(PrepareResource(np.asarray(state), self._idx(wires), name))

    def build(self, data: Sequence[str], output: Sequence[str] | None = None, name: str = "") -> Circuit:
        sys = QuditSystem(self.d, tuple(self.wires))
        return Circuit(
            sys,
            self._idx(data),
            tuple(self.instructions),
            None if output is None else self._idx(output),
            name,
        )


# --- serialization -----------------------------------------------------------


def _fmt_c(z: complex) -> str:
    return f"{float(z.real)!r},{float(z.imag)!r}"


def _fmt_amps(values: np.ndarray) -> str:
    return ";".join(_fmt_c(z) for z in values.reshape(-1))


def _parse_amps(text: str) -> np.ndarray:
    try:
        pairs = [p.split(",") for p in text.split(";")]
        return np.array([complex(float(re_), float(im)) for re_, im in pairs])
    except ValueError as exc:
        raise CircuitError(f"bad amplitude list {text[:40]!r}") from exc


def _prep_token(ins: PrepareResource, d: int) -> str:
    k = len(ins.targets)
    if ins.name in ("ghz", "max") and k >= 2:
        ref = (gates.ghz_state if ins.name == "ghz" else gates.max_state)(d, k)
        if _mat_eq(ref.amplitudes, ins.state):
            return ins.name
    return "[" + _fmt_amps(ins.state) + "]"


def dumps(c: Circuit) -> str:
    """Canonical text form; ``loads(dumps(c)) == c`` exactly."""
    sys = c.system
    d = sys.d
    lab = [w.label for w in sys.wires]
    lines = []
    if c.name:
        lines.append(f"name {c.name}")
    lines.append(f"system d={d} wires=" + ",".join(f"{w.label}:{w.owner}" for w in sys.wires))
    lines.append("data " + ",".join(lab[w] for w in c.data_wires))
    if c.output_wires != c.data_wires:
        lines.append("output " + ",".join(lab[w] for w in c.output_wires))

    refs: dict[int, str] = {}
    body = []

    def gate_token(g: np.ndarray, name: str | None) -> str:
        if name is not None:
            try:
                if _mat_eq(gates.named_gate(name, d), g):
                    return name
            except KeyError:
                pass
        for key, ref in refs.items():
            if key == id(g):
                return "@" + ref
        ref = f"m{len(refs)}"
        refs[id(g)] = ref
        lines.append(f"matrix {ref} {g.shape[0]} {g.shape[1]} {_fmt_amps(g)}")
        if name is not None:
            lines[-1] += f" name={name}"
        return "@" + ref

    for ins in c.instructions:
        if isinstance(ins, Unitary):
            tok = gate_token(ins.gate, ins.name)
            body.append(f"u {tok} " + ",".join(lab[t] for t in ins.targets))
        elif isinstance(ins, Measure):
            body.append(f"meas {lab[ins.target]} -> {ins.result}")
        elif isinstance(ins, ClassicallyControlled):
            tok = gate_token(ins.gate, ins.name)
            body.append(
                f"cgate {tok} " + ",".join(lab[t] for t in ins.targets) + f" exp={ins.exponent.to_text()}"
            )
        elif isinstance(ins, PrepareResource):
            tok = _prep_token(ins, d)
            line = f"prep {tok} " + ",".join(lab[t] for t in ins.targets)
            if tok.startswith("[") and ins.name:
                line += f" name={ins.name}"
            body.append(line)
    return "\n".join(lines + body) + "\n"


def loads(text: str) -> Circuit:
    d = None
    wires: list[Wire] = []
    data = output = None
    name = ""
    matrices: dict[str, tuple[np.ndarray, str | None]] = {}
    instructions: list[Instruction] = []

    def idx(csv: str) -> tuple[int, ...]:
        lookup = {w.label: i for i, w in enumerate(wires)}
        try:
            return tuple(lookup[x] for x in csv.split(","))
        except KeyError as exc:
            raise CircuitError(f"unknown wire {exc.args[0]!r}") from None

    def resolve(tok: str) -> tuple[np.ndarray, str | None]:
        if tok.startswith("@"):
            try:
                return matrices[tok[1:]]
            except KeyError:
                raise CircuitError(f"undefined matrix {tok}") from None
        try:
            return gates.named_gate(tok, d), tok
        except KeyError as exc:
            raise CircuitError(str(exc)) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        parts = rest.split()
        if head not in ("system", "name") and d is None:
            raise CircuitError(f"line {lineno}: 'system' must come first")
        if head == "name":
            name = rest.strip()
        elif head == "system":
            fields = dict(p.split("=", 1) for p in parts)
            d = int(fields["d"])
            for item in fields["wires"].split(","):
                label, owner = item.split(":")
                wires.append(Wire(label, owner))
        elif head == "data":
            data = idx(parts[0]) if parts else ()
        elif head == "output":
            output = idx(parts[0]) if parts else ()
        elif head == "matrix":
            ref, rows, cols, amps = parts[:4]
            mname = parts[4].split("=", 1)[1] if len(parts) > 4 else None
            matrices[ref] = (_parse_amps(amps).reshape(int(rows), int(cols)), mname)
        elif head == "u":
            mat, gname = resolve(parts[0])
            instructions.append(Unitary(mat, idx(parts[1]), gname))
        elif head == "meas":
            if len(parts) != 3 or parts[1] != "->":
                raise CircuitError(f"line {lineno}: expected 'meas <qwire> -> <cwire>'")
            instructions.append(Measure(idx(parts[0])[0], parts[2]))
        elif head == "cgate":
            mat, gname = resolve(parts[0])
            if not parts[2].startswith("exp="):
                raise CircuitError(f"line {lineno}: cgate needs exp=...")
            instructions.append(
                ClassicallyControlled(mat, idx(parts[1]), Exponent.from_text(parts[2][4:]), gname)
            )
        elif head == "prep":
            tok, targets = parts[0], idx(parts[1])
            pname = parts[2].split("=", 1)[1] if len(parts) > 2 else None
            if tok == "ghz":
                state, pname = gates.ghz_state(d, len(targets)).amplitudes, "ghz"
            elif tok == "max":
                state, pname = gates.max_state(d, len(targets)).amplitudes, "max"
            elif tok.startswith("[") and tok.endswith("]"):
                state = _parse_amps(tok[1:-1])
            else:
                raise CircuitError(f"line {lineno}: unknown state {tok!r}")
            instructions.append(PrepareResource(state, targets, pname))
        else:
            raise CircuitError(f"line {lineno}: unknown statement {head!r}")
    if d is None:
        raise CircuitError("missing 'system' line")
    return Circuit(QuditSystem(d, tuple(wires)), data or (), tuple(instructions), output, name)


# --- text rendering ----------------------------------------------------------


def _glyphs(c: Circuit, ins: Instruction) -> dict[int, str]:
    """Per-wire cell text for one instruction (one time column)."""
    if isinstance(ins, Measure):
        return {ins.target: f"M>{ins.result}"}
    if isinstance(ins, PrepareResource):
        return {t: f"|{ins.name or 'psi'}>" for t in ins.targets}
    label = ins.name or "U"
    if label.split("^")[0] in ("CX", "CZ") and len(ins.targets) == 2:
        base, power = gates.parse_gate_name(label)
        ctrl, tgt = ins.targets
        mark = base[1] if power == 1 else f"{base[1]}^{power}"
        cells = {ctrl: "*", tgt: mark}
    elif len(ins.targets) == 1:
        cells = {ins.targets[0]: label}
    else:
        cells = {t: f"{label}.{k}" for k, t in enumerate(ins.targets)}
    if isinstance(ins, ClassicallyControlled):
        suffix = "{" + ins.exponent.to_text() + "}"
        cells = {t: v + suffix for t, v in cells.items()}
    return cells


def render_text(c: Circuit) -> str:
    """Fixed-width wire diagram (as ``#`` comments) followed by the circuit file.

    The output parses back with :func:`loads` to an identical circuit.
    """
    sys = c.system
    labels = [f"{w.label}[{w.owner}]" for w in sys.wires]
    width = max((len(s) for s in labels), default=0)
    rows = [s.ljust(width) + " :" for s in labels]
    for ins in c.instructions:
        cells = _glyphs(c, ins)
        cw = max(len(v) for v in cells.values()) + 2
        lo, hi = min(cells), max(cells)
        for w in range(sys.num_wires):
            if w in cells:
                rows[w] += "-" + cells[w].center(cw - 2, "-") + "-"
            elif lo < w < hi:
                rows[w] += "-" + "|".center(cw - 2, "-") + "-"
            else:
                rows[w] += "-" * cw
    header = [
        f"# circuit {c.name or '(unnamed)'}  d={sys.d}  wires={sys.num_wires}",
        "# data:   " + ",".join(sys.wires[w].label for w in c.data_wires),
        "# output: " + ",".join(sys.wires[w].label for w in c.output_wires),
    ]
    return "\n".join(header + ["# " + r.rstrip() for r in rows]) + "\n" + dumps(c)
