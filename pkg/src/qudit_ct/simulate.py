"""Branch enumeration and Monte Carlo sampling for :class:`~qudit_ct.circuit.Circuit`.

Both engines push a tensor with one axis per *live* wire plus a trailing
column axis through the instruction list. For enumeration the columns are
the data basis (so the result is the Kraus operator itself); for sampling
there is a single column holding the input state. Ancillas become live on
first touch and measured wires are dropped from the tensor, which keeps the
peak size well below ``d**num_wires`` for the protocols in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    Circuit,
    CircuitError,
    ClassicallyControlled,
    Measure,
    PrepareResource,
    Unitary,
)
from .gates import mpow
from .tensor import ComplexMatrix, StateVector, apply_to_wires


class SamplingError(RuntimeError):
    """A sampled branch had (numerically) zero probability."""


@dataclass(frozen=True)
class Branch:
    kraus: ComplexMatrix
    weight: float


@dataclass(frozen=True)
class BranchDecomposition:
    cwires: tuple[str, ...]
    branches: dict[tuple[int, ...], Branch]
    data_dim: int

    def __len__(self) -> int:
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches.items())

    @property
    def weight_sum(self) -> float:
        return float(sum(b.weight for b in self.branches.values()))

    def completeness_error(self) -> float:
        """max-norm of sum_b K_b^dag K_b - I."""
        acc = sum(b.kraus.conj().T @ b.kraus for b in self.branches.values())
        return float(np.max(np.abs(acc - np.eye(self.data_dim))))

    def max_difference(self, other: "BranchDecomposition") -> float:
        """Largest entrywise Kraus difference; inf if outcome sets differ."""
        if self.branches.keys() != other.branches.keys():
            return float("inf")
        return max(
            (float(np.max(np.abs(b.kraus - other.branches[k].kraus))) for k, b in self),
            default=0.0,
        )


@dataclass
class _Run:
    live: list[int]
    psi: np.ndarray
    outcomes: dict[str, int] = field(default_factory=dict)
    record: tuple[int, ...] = ()


class _Stepper:
    def __init__(self, c: Circuit):
        self.c = c
        self.d = c.d
        self._pow_cache: dict[tuple[int, int], np.ndarray] = {}

    def start(self, column_block: np.ndarray) -> _Run:
        k = len(self.c.data_wires)
        psi = column_block.reshape((self.d,) * k + (column_block.shape[-1],))
        return _Run(list(self.c.data_wires), psi)

    def _activate(self, run: _Run, wires) -> None:
        d = self.d
        for w in wires:
            if w in run.live:
                continue
            shape = run.psi.shape
            out = np.zeros(shape[:-1] + (d,) + shape[-1:], dtype=complex)
            out[..., 0, :] = run.psi
            run.psi = out
            run.live.append(w)

    def _apply(self, run: _Run, gate: np.ndarray, targets) -> None:
        self._activate(run, targets)
        axes = [run.live.index(t) for t in targets]
        run.psi = apply_to_wires(run.psi, gate, axes, self.d)

    def _power(self, gate: np.ndarray, e: int) -> np.ndarray:
        key = (id(gate), e)
        if key not in self._pow_cache:
            self._pow_cache[key] = mpow(gate, e)
        return self._pow_cache[key]

    def prepare(self, run: _Run, ins: PrepareResource) -> None:
        k = len(ins.targets)
        state = ins.state.reshape((self.d,) * k)
        n_live = len(run.live)
        psi = np.multiply.outer(run.psi, state)
        # outer() appends the new axes after the column axis; move the column last
        run.psi = np.moveaxis(psi, n_live, -1)
        run.live.extend(ins.targets)

    def step(self, run: _Run, ins) -> None:
        if isinstance(ins, Unitary):
            self._apply(run, ins.gate, ins.targets)
        elif isinstance(ins, ClassicallyControlled):
            e = ins.exponent.evaluate(run.outcomes, self.d)
            if e:
                self._apply(run, self._power(ins.gate, e), ins.targets)
            else:
                self._activate(run, ins.targets)
        elif isinstance(ins, PrepareResource):
            self.prepare(run, ins)
        else:
            raise TypeError(f"not a stepping instruction: {ins!r}")

    def split(self, run: _Run, ins: Measure, outcome: int) -> _Run:
        self._activate(run, [ins.target])
        axis = run.live.index(ins.target)
        live = run.live[:axis] + run.live[axis + 1:]
        return _Run(
            live,
            np.take(run.psi, outcome, axis=axis),
            {**run.outcomes, ins.result: outcome},
            run.record + (outcome,),
        )

    def finish(self, run: _Run) -> np.ndarray:
        out = list(self.c.output_wires)
        self._activate(run, out)
        stray = [w for w in run.live if w not in out]
        if stray:
            labels = [self.c.system.wires[w].label for w in stray]
            raise CircuitError(f"wires {labels} end unmeasured and are not outputs")
        axes = [run.live.index(w) for w in out] + [len(run.live)]
        psi = run.psi.transpose(axes)
        return psi.reshape(self.d ** len(out), psi.shape[-1])


def enumerate_branches(c: Circuit) -> BranchDecomposition:
    """Kraus operator (data-in -> data-out) and weight for every outcome tuple.

    Outcome tuples list one digit per ``Measure`` in instruction order. Weights
    are ``||K||_F**2 / dim(data)``, the branch probability for a maximally
    mixed data input. Phases are left exactly as the gate algebra produces them.
    """
    stepper = _Stepper(c)
    data_dim = c.d ** len(c.data_wires)
    runs = [stepper.start(np.eye(data_dim, dtype=complex))]
    for ins in c.instructions:
        if isinstance(ins, Measure):
            runs = [stepper.split(r, ins, k) for r in runs for k in range(c.d)]
        else:
            for r in runs:
                stepper.step(r, ins)
    branches = {}
    for r in runs:
        kraus = stepper.finish(r)
        branches[r.record] = Branch(kraus, float(np.sum(np.abs(kraus) ** 2)) / data_dim)
    return BranchDecomposition(c.classical_wires, branches, data_dim)


def sample(
    c: Circuit, input_state, seed: int, *, min_prob: float = 1e-300
) -> tuple[tuple[int, ...], StateVector]:
    """Run the circuit once on ``input_state`` with Born-rule outcomes.

    Returns the outcome tuple and the normalized output data state. Raises
    :class:`SamplingError` rather than renormalizing a vanishing branch.
    """
    psi = np.asarray(input_state, dtype=complex).reshape(-1)
    data_dim = c.d ** len(c.data_wires)
    if psi.shape[0] != data_dim:
        raise ValueError(f"input has dimension {psi.shape[0]}, data register needs {data_dim}")
    rng = np.random.default_rng(seed)
    stepper = _Stepper(c)
    run = stepper.start(psi.reshape(-1, 1))
    for ins in c.instructions:
        if isinstance(ins, Measure):
            stepper._activate(run, [ins.target])
            axis = run.live.index(ins.target)
            moved = np.moveaxis(run.psi, axis, 0).reshape(c.d, -1)
            probs = np.sum(np.abs(moved) ** 2, axis=1)
            total = probs.sum()
            if total < min_prob:
                raise SamplingError(f"branch probability underflow at {ins.result!r}")
            k = int(rng.choice(c.d, p=probs / total))
            run = stepper.split(run, ins, k)
        else:
            stepper.step(run, ins)
    out = stepper.finish(run)[:, 0]
    norm = np.linalg.norm(out)
    if norm**2 < min_prob:
        raise SamplingError("output state has vanishing norm")
    return run.record, StateVector(out / norm)
