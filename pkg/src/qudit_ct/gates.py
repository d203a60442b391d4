"""Qudit Weyl-Heisenberg gates, Fourier and Gaussian, and the GHZ / Max states.

Phase conventions: ``omega = exp(2*pi*i/d)`` and ``zeta = exp(i*pi*(d+1)/d)``,
so that ``zeta**2 == omega`` and ``zeta**(d*d) == 1`` for every d.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tensor import ComplexMatrix, DimensionError, StateVector, UNITARY_TOL, is_unitary


def _check_d(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"qudit dimension must be an integer >= 2, got {d}")


@dataclass(frozen=True)
class PhaseConvention:
    d: int

    def __post_init__(self):
        _check_d(self.d)

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    @property
    def zeta(self) -> complex:
        return np.exp(1j * np.pi * (self.d + 1) / self.d)

    def omega_pow(self, k: int) -> complex:
        # reduce first so large exponents don't lose precision
        return np.exp(2j * np.pi * (k % self.d) / self.d)

    def zeta_pow(self, k: int) -> complex:
        d = self.d
        return np.exp(1j * np.pi * (d + 1) * (k % (2 * d * d)) / d)


def pauli_x(d: int) -> ComplexMatrix:
    """Cyclic shift, ``X|k> = |k+1 mod d>``."""
    _check_d(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def pauli_z(d: int) -> ComplexMatrix:
    """Clock, ``Z|k> = omega**k |k>``."""
    pc = PhaseConvention(d)
    return np.diag([pc.omega_pow(k) for k in range(d)])


def fourier(d: int) -> ComplexMatrix:
    """``F[j, k] = omega**(j*k) / sqrt(d)``; satisfies ``F X F^-1 = Z``."""
    pc = PhaseConvention(d)
    return np.array(
        [[pc.omega_pow(j * k) for k in range(d)] for j in range(d)]
    ) / np.sqrt(d)


def gaussian(d: int) -> ComplexMatrix:
    """``G = diag(zeta**(k*k))``."""
    pc = PhaseConvention(d)
    return np.diag([pc.zeta_pow(k * k) for k in range(d)])


def pauli_y(d: int) -> ComplexMatrix:
    """Defined through ``G X G^-1 = Y^-1``; equals ``zeta * X^-1 Z^-1``."""
    g = gaussian(d)
    return (g @ pauli_x(d) @ g.conj().T).conj().T


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return np.asarray(a).conj().T


def mpow(a: ComplexMatrix, k: int) -> ComplexMatrix:
    """Integer matrix power of a unitary; negative powers use the adjoint."""
    a = np.asarray(a, dtype=complex)
    if k < 0:
        a, k = dagger(a), -k
    return np.linalg.matrix_power(a, k)


def controlled(blocks: list[ComplexMatrix]) -> ComplexMatrix:
    """``sum_l |l><l| (x) blocks[l]`` with the control on the most significant wire."""
    blocks = [np.asarray(b, dtype=complex) for b in blocks]
    if len(blocks) < 2:
        raise ValueError("need one block per control value (d >= 2)")
    shape = blocks[0].shape
    for b in blocks:
        if b.shape != shape or b.ndim != 2 or shape[0] != shape[1]:
            raise DimensionError(f"block shapes differ or are not square: {b.shape} vs {shape}")
        if not is_unitary(b, 1e-10):
            raise ValueError("controlled() blocks must be unitary")
    d, k = len(blocks), shape[0]
    out = np.zeros((d * k, d * k), dtype=complex)
    for ell, b in enumerate(blocks):
        out[ell * k:(ell + 1) * k, ell * k:(ell + 1) * k] = b
    return out


def csum(d: int, power: int = 1) -> ComplexMatrix:
    """Generalized CNOT: ``|a, b> -> |a, b + power*a>``."""
    x = pauli_x(d)
    return controlled([mpow(x, power * ell) for ell in range(d)])


def cphase(d: int, power: int = 1) -> ComplexMatrix:
    """Generalized CZ: ``|a, b> -> omega**(power*a*b) |a, b>``."""
    z = pauli_z(d)
    return controlled([mpow(z, power * ell) for ell in range(d)])


def _basis_state(d: int, digits: tuple[int, ...]) -> int:
    idx = 0
    for k in digits:
        idx = idx * d + k
    return idx


def max_state(d: int, shares: int) -> StateVector:
    """Uniform superposition over digit strings whose sum is 0 mod d."""
    _check_d(d)
    if shares < 2:
        raise ValueError(f"max_state needs at least 2 shares, got {shares}")
    amps = np.zeros(d**shares, dtype=complex)
    amp = d ** ((1 - shares) / 2)
    for digits in itertools.product(range(d), repeat=shares):
        if sum(digits) % d == 0:
            amps[_basis_state(d, digits)] = amp
    return StateVector(amps)


def ghz_state(d: int, shares: int) -> StateVector:
    _check_d(d)
    if shares < 2:
        raise ValueError(f"ghz_state needs at least 2 shares, got {shares}")
    amps = np.zeros(d**shares, dtype=complex)
    for k in range(d):
        amps[_basis_state(d, (k,) * shares)] = d**-0.5
    return StateVector(amps)


def basis_state(d: int, digits: tuple[int, ...]) -> StateVector:
    amps = np.zeros(d ** len(digits), dtype=complex)
    amps[_basis_state(d, tuple(digits))] = 1.0
    return StateVector(amps)


def random_unitary(dim: int, seed: int) -> ComplexMatrix:
    """Seeded Haar-like unitary: QR of a complex Gaussian, R's diagonal made positive."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_state(dim: int, seed: int) -> StateVector:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v))


# --- named gates ---------------------------------------------------------

_BASE_GATES = {
    "I": lambda d: np.eye(d, dtype=complex),
    "X": pauli_x,
    "Y": pauli_y,
    "Z": pauli_z,
    "F": fourier,
    "G": gaussian,
    "CX": csum,
    "CZ": cphase,
}

_NAME_RE = re.compile(r"^([A-Z]+)(?:\^(-?\d+))?$")


def parse_gate_name(name: str) -> tuple[str, int]:
    match = _NAME_RE.match(name)
    if not match or match.group(1) not in _BASE_GATES:
        raise KeyError(f"unknown gate name {name!r}")
    return match.group(1), int(match.group(2) or 1)


def gate_name(base: str, power: int = 1) -> str:
    return base if power == 1 else f"{base}^{power}"


@lru_cache(maxsize=256)
def _named_gate_cached(name: str, d: int) -> np.ndarray:
    base, power = parse_gate_name(name)
    if base in ("CX", "CZ"):
        mat = _BASE_GATES[base](d, power)
    else:
        mat = mpow(_BASE_GATES[base](d), power)
    mat.setflags(write=False)
    return mat


def named_gate(name: str, d: int) -> ComplexMatrix:
    """Matrix for names like ``X``, ``F^-1``, ``CZ^2`` in dimension d."""
    _check_d(d)
    return _named_gate_cached(name, d)


def identify_pauli_power(mat: ComplexMatrix, d: int, tol: float = UNITARY_TOL) -> str | None:
    """Name of a single-qudit ``X^k``, ``Z^k`` or ``Y^k`` equal to ``mat``, if any."""
    mat = np.asarray(mat)
    if mat.shape != (d, d):
        return None
    for base in ("X", "Z", "Y"):
        for k in range(1, d):
            if np.max(np.abs(named_gate(gate_name(base, k), d) - mat)) <= tol:
                return gate_name(base, k)
    return None
