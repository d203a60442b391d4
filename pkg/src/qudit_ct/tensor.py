"""Dense linear algebra over multi-qudit registers.

Conventions used throughout the package:

* wire 0 is the most significant digit of a basis index (big-endian), so
  ``tensor(a, b)`` puts ``a`` on the lower-numbered wires;
* operators are plain ``numpy`` complex arrays, states are :class:`StateVector`;
* registers larger than :func:`dim_cap` are rejected up front.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

ComplexMatrix = np.ndarray

DEFAULT_DIM_CAP = 16384
DEFAULT_TOL = 1e-10
UNITARY_TOL = 1e-12

_OWNER_RE = re.compile(r"^(Leader|P[1-9][0-9]*)$")


class DimensionError(ValueError):
    """Raised on shape mismatches and on registers over the size cap."""


def dim_cap() -> int:
    """Largest allowed register dimension d**m; ``CT_DIM_CAP`` overrides it."""
    raw = os.environ.get("CT_DIM_CAP")
    if raw is None:
        return DEFAULT_DIM_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DimensionError(f"CT_DIM_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise DimensionError(f"CT_DIM_CAP must be positive, got {cap}")
    return cap


def check_cap(d: int, m: int) -> None:
    if d**m > dim_cap():
        raise DimensionError(
            f"register dimension {d}^{m} = {d**m} exceeds cap {dim_cap()}"
        )


@dataclass(frozen=True)
class Wire:
    label: str
    owner: str


@dataclass(frozen=True)
class QuditSystem:
    """A register of ``len(wires)`` qudits of dimension ``d``, each owned by a party."""

    d: int
    wires: tuple[Wire, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DimensionError(f"qudit dimension must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "wires", tuple(self.wires))
        labels = [w.label for w in self.wires]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate wire labels in {labels}")
        for w in self.wires:
            if not _OWNER_RE.match(w.owner):
                raise ValueError(f"wire {w.label!r} has invalid owner {w.owner!r}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def uniform(cls, d: int, m: int, owner: str = "Leader") -> "QuditSystem":
        return cls(d, tuple(Wire(f"q{i}", owner) for i in range(m)))

    @property
    def num_wires(self) -> int:
        return len(self.wires)

    @property
    def dim(self) -> int:
        return self.d**self.num_wires

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown wire {label!r}") from None

    def owner(self, wire: int) -> str:
        return self.wires[wire].owner


@dataclass(frozen=True)
class StateVector:
    """Amplitude vector; ``normalized=False`` marks unnormalized branch residues."""

    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > UNITARY_TOL:
            raise ValueError(
                f"state flagged normalized has norm {np.linalg.norm(amps):.3e}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __len__(self) -> int:
        return self.dim


def is_unitary(a: ComplexMatrix, tol: float = UNITARY_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def tensor(*ops: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product, first argument most significant."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def num_wires_for(dim: int, d: int) -> int:
    """Number of qudits spanning ``dim``; raises if ``dim`` is not a power of d."""
    m, rest = 0, dim
    while rest > 1 and rest % d == 0:
        rest //= d
        m += 1
    if rest != 1:
        raise DimensionError(f"dimension {dim} is not a power of {d}")
    return m


def _check_targets(targets: Sequence[int], m: int) -> None:
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate target index in {list(targets)}")
    for t in targets:
        if not 0 <= t < m:
            raise DimensionError(f"target {t} out of range for {m} wires")


def apply_to_wires(
    state: np.ndarray, op: ComplexMatrix, targets: Sequence[int], d: int
) -> np.ndarray:
    """Apply ``op`` to axes ``targets`` of a tensor with per-wire axes of size d.

    ``state`` may carry extra trailing axes (e.g. a batch of input columns);
    only the listed axes are contracted. Returns a new array.
    """
    k = len(targets)
    gate = np.asarray(op).reshape((d,) * (2 * k))
    out = np.tensordot(gate, state, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate's output axes first; move them back into place
    return np.moveaxis(out, list(range(k)), list(targets))


def embed(op: ComplexMatrix, targets: Sequence[int], sys: QuditSystem) -> ComplexMatrix:
    """Full-register operator acting as ``op`` on ``targets`` (in listed order)."""
    op = np.asarray(op, dtype=complex)
    m, d = sys.num_wires, sys.d
    targets = list(targets)
    _check_targets(targets, m)
    if op.shape != (d ** len(targets),) * 2:
        raise DimensionError(
            f"operator shape {op.shape} does not act on {len(targets)} qudits of d={d}"
        )
    check_cap(d, m)
    ident = np.eye(sys.dim, dtype=complex).reshape((d,) * m + (sys.dim,))
    return apply_to_wires(ident, op, targets, d).reshape(sys.dim, sys.dim)


def projector(outcome: int, wire: int, sys: QuditSystem) -> ComplexMatrix:
    if not 0 <= outcome < sys.d:
        raise ValueError(f"outcome {outcome} out of range for d={sys.d}")
    ket_bra = np.zeros((sys.d, sys.d), dtype=complex)
    ket_bra[outcome, outcome] = 1.0
    return embed(ket_bra, [wire], sys)


def permute_wires(op: ComplexMatrix, perm: Sequence[int], d: int) -> ComplexMatrix:
    """Relabel an operator's wires: wire ``i`` of the result is wire ``perm[i]`` of ``op``."""
    op = np.asarray(op)
    m = num_wires_for(op.shape[0], d)
    if sorted(perm) != list(range(m)):
        raise DimensionError(f"{list(perm)} is not a permutation of {m} wires")
    t = op.reshape((d,) * (2 * m))
    t = t.transpose(list(perm) + [m + p for p in perm])
    return t.reshape(op.shape)


def equal_up_to_global_phase(
    a: ComplexMatrix, b: ComplexMatrix, tol: float = DEFAULT_TOL
) -> tuple[bool, float]:
    """Test ``a == exp(i*theta) * b`` in max-norm.

    theta is read off the largest-magnitude entry of ``b`` and returned in
    [0, 2*pi). The flag is False (with that theta) when the aligned
    difference exceeds ``tol``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    theta = phase_of(a, b)
    dev = float(np.max(np.abs(a - np.exp(1j * theta) * b))) if a.size else 0.0
    return dev <= tol, theta


def phase_of(a: ComplexMatrix, b: ComplexMatrix) -> float:
    flat = np.abs(b).reshape(-1)
    if flat.size == 0 or flat.max() == 0:
        raise ValueError("reference matrix is zero; phase undefined")
    idx = int(np.argmax(flat))
    num = a.reshape(-1)[idx]
    if num == 0:
        return 0.0
    # difference of angles, not angle of the ratio: exact (0.0) when a == b
    return float((np.angle(num) - np.angle(b.reshape(-1)[idx])) % (2 * np.pi))


def aligned_deviation(a: ComplexMatrix, b: ComplexMatrix) -> tuple[float, float]:
    """(max-norm of a - exp(i theta) b, theta) with theta from :func:`phase_of`."""
    theta = phase_of(a, b)
    return float(np.max(np.abs(np.asarray(a) - np.exp(1j * theta) * np.asarray(b)))), theta


def kron_all(ops: Iterable[ComplexMatrix]) -> ComplexMatrix:
    ops = list(ops)
    return tensor(*ops) if ops else np.eye(1, dtype=complex)
