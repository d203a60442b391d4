"""Qudit circuit simulation and branch-wise verification of compressed teleportation."""

from .circuit import Circuit, CircuitBuilder, Exponent, dumps, loads, render_text
from .gates import (
    controlled,
    fourier,
    gaussian,
    ghz_state,
    max_state,
    pauli_x,
    pauli_y,
    pauli_z,
    random_unitary,
)
from .protocols import (
    CompressedTransformation,
    NetworkSpec,
    baseline_bidirectional,
    build_ct_controlled,
    build_ct_x_compressed,
    conjugate_variant,
    demo_swap,
    demo_toffoli,
    target_tc,
    two_person_teleport,
)
from .resources import ResourceClaim, ResourceLedger, ledger
from .simulate import BranchDecomposition, enumerate_branches, sample
from .tensor import QuditSystem, StateVector, embed, equal_up_to_global_phase, projector, tensor
from .verify import VerificationReport, sweep, verify, verify_resource_claims

__all__ = [
    "BranchDecomposition",
    "Circuit",
    "CircuitBuilder",
    "CompressedTransformation",
    "Exponent",
    "NetworkSpec",
    "QuditSystem",
    "ResourceClaim",
    "ResourceLedger",
    "StateVector",
    "VerificationReport",
    "baseline_bidirectional",
    "build_ct_controlled",
    "build_ct_x_compressed",
    "conjugate_variant",
    "controlled",
    "demo_swap",
    "demo_toffoli",
    "dumps",
    "embed",
    "enumerate_branches",
    "equal_up_to_global_phase",
    "fourier",
    "gaussian",
    "ghz_state",
    "ledger",
    "loads",
    "max_state",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "projector",
    "random_unitary",
    "render_text",
    "sample",
    "sweep",
    "target_tc",
    "tensor",
    "two_person_teleport",
    "verify",
    "verify_resource_claims",
]

__version__ = "0.1.0"
