import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracle import full_op
from qudit_ct.gates import cphase, csum, fourier, ghz_state, max_state, pauli_x, pauli_z, random_unitary
from qudit_ct.tensor import (
    DimensionError,
    QuditSystem,
    StateVector,
    Wire,
    embed,
    equal_up_to_global_phase,
    is_unitary,
    permute_wires,
    projector,
    tensor,
)


def ket(d, *ds):
    v = np.zeros(d ** len(ds), dtype=complex)
    idx = 0
    for k in ds:
        idx = idx * d + k
    v[idx] = 1
    return v


def test_tensor_identity():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_x_on_first_wire_is_most_significant():
    np.testing.assert_array_equal(tensor(pauli_x(2), np.eye(2)) @ ket(2, 0, 0), ket(2, 1, 0))


def test_tensor_fourier_maps_max_to_ghz():
    f = fourier(3)
    np.testing.assert_allclose(tensor(f, f) @ max_state(3, 2).amplitudes, ghz_state(3, 2).amplitudes, atol=1e-12)


def test_tensor_mixed_product():
    a, b, c, d = (random_unitary(2, s) for s in range(4))
    np.testing.assert_allclose(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d), atol=1e-12)


def test_embed_on_second_wire():
    sys = QuditSystem.uniform(2, 2)
    np.testing.assert_array_equal(embed(pauli_x(2), [1], sys) @ ket(2, 0, 0), ket(2, 0, 1))


def test_embed_identity_layout():
    sys = QuditSystem.uniform(2, 2)
    np.testing.assert_array_equal(embed(csum(2), [0, 1], sys), csum(2))


def test_embed_z3_phase():
    sys = QuditSystem.uniform(3, 2)
    omega = np.exp(2j * np.pi / 3)
    # oracle: direct kron expansion
    expected = np.kron(np.diag([1, omega, omega**2]), np.eye(3)) @ ket(3, 1, 2)
    got = embed(pauli_z(3), [0], sys) @ ket(3, 1, 2)
    np.testing.assert_allclose(got, expected, atol=1e-15)
    np.testing.assert_allclose(got, omega * ket(3, 1, 2), atol=1e-15)


def test_embed_reversed_targets_matches_oracle():
    sys = QuditSystem.uniform(3, 3)
    g = random_unitary(9, 5)
    np.testing.assert_allclose(embed(g, [2, 0], sys), full_op(g, [2, 0], 3, 3), atol=1e-13)


def test_embed_errors():
    sys = QuditSystem.uniform(2, 2)
    with pytest.raises(DimensionError):
        embed(np.eye(4), [0], sys)
    with pytest.raises(DimensionError):
        embed(np.eye(4), [1, 1], sys)
    with pytest.raises(DimensionError):
        embed(np.eye(2), [2], sys)


def test_embed_respects_cap(monkeypatch):
    monkeypatch.setenv("CT_DIM_CAP", "8")
    with pytest.raises(DimensionError):
        embed(np.eye(2), [0], QuditSystem.uniform(2, 4))


def test_equal_up_to_global_phase_pure_phase():
    a = random_unitary(3, 1)
    ok, theta = equal_up_to_global_phase(a, np.exp(1j * np.pi / 7) * a, 1e-12)
    assert ok
    assert theta == pytest.approx((-np.pi / 7) % (2 * np.pi), abs=1e-12)


def test_equal_up_to_global_phase_distinct_paulis():
    ok, _ = equal_up_to_global_phase(pauli_x(2), pauli_z(2), 1e-10)
    assert not ok


def test_equal_up_to_global_phase_zeta():
    zeta = np.exp(1j * np.pi * 4 / 3)
    m = random_unitary(3, 2)
    ok, theta = equal_up_to_global_phase(zeta * m, m, 1e-12)
    assert ok
    assert np.exp(1j * theta) == pytest.approx(zeta, abs=1e-12)


def test_equal_up_to_global_phase_shape_mismatch():
    with pytest.raises(DimensionError):
        equal_up_to_global_phase(np.eye(2), np.eye(3))


def test_projector_examples():
    sys1 = QuditSystem.uniform(2, 1)
    np.testing.assert_array_equal(projector(0, 0, sys1), np.diag([1, 0]))
    sys3 = QuditSystem.uniform(3, 1)
    np.testing.assert_array_equal(sum(projector(k, 0, sys3) for k in range(3)), np.eye(3))
    sys2 = QuditSystem.uniform(2, 2)
    np.testing.assert_array_equal(projector(1, 1, sys2), np.kron(np.eye(2), np.diag([0, 1])))
    with pytest.raises(ValueError):
        projector(3, 0, sys3)


def test_permute_wires_swaps_factors():
    a = random_unitary(2, 1)
    np.testing.assert_allclose(permute_wires(np.kron(np.kron(a, np.eye(2)), np.eye(2)), [1, 0, 2], 2),
                               np.kron(np.kron(np.eye(2), a), np.eye(2)), atol=1e-15)
    with pytest.raises(DimensionError):
        permute_wires(np.eye(4), [0, 0], 2)


def test_quditsystem_validation():
    sys = QuditSystem(3, (Wire("a", "Leader"), Wire("b", "P2")))
    assert sys.dim == 9 and sys.index("b") == 1 and sys.owner(1) == "P2"
    with pytest.raises(ValueError):
        QuditSystem(2, (Wire("a", "Leader"), Wire("a", "P1")))
    with pytest.raises(ValueError):
        QuditSystem(2, (Wire("a", "Alice"),))
    with pytest.raises(ValueError):
        QuditSystem(1, ())


def test_statevector_flags():
    StateVector(np.array([3, 4]) / 5)
    StateVector(np.array([1, 1]), normalized=False)
    with pytest.raises(ValueError):
        StateVector(np.array([1, 1]))


# --- properties ---------------------------------------------------------------

dims = st.integers(2, 4)
seeds = st.integers(0, 2**32 - 1)


@given(d=dims, seed=seeds, data=st.data())
def test_embed_preserves_unitarity(d, seed, data):
    m = data.draw(st.integers(1, 3))
    k = data.draw(st.integers(1, m))
    targets = data.draw(st.permutations(range(m)))[:k]
    u = embed(random_unitary(d**k, seed), targets, QuditSystem.uniform(d, m))
    assert is_unitary(u, 1e-12)


@given(d=dims, s1=seeds, s2=seeds, data=st.data())
def test_embed_commutes_with_composition(d, s1, s2, data):
    m = data.draw(st.integers(1, 3))
    k = data.draw(st.integers(1, m))
    targets = data.draw(st.permutations(range(m)))[:k]
    sys = QuditSystem.uniform(d, m)
    a, b = random_unitary(d**k, s1), random_unitary(d**k, s2)
    np.testing.assert_allclose(embed(a @ b, targets, sys), embed(a, targets, sys) @ embed(b, targets, sys), atol=1e-12)


@given(d=st.integers(2, 5), seed=seeds, p1=st.integers(0, 99), p2=st.integers(0, 99))
def test_phase_equivalence_is_an_equivalence_on_exact_multiples(d, seed, p1, p2):
    a = random_unitary(d, seed)
    u, v = np.exp(2j * np.pi * p1 / 100), np.exp(2j * np.pi * p2 / 100)
    assert equal_up_to_global_phase(a, a, 0.0)[0]
    b = u * a
    c = v * b
    for x, y in [(a, b), (b, a), (b, c), (a, c)]:
        assert equal_up_to_global_phase(x, y, 1e-13)[0]


@given(d=st.integers(2, 4), m=st.integers(1, 3), data=st.data())
def test_projector_completeness_exact(d, m, data):
    w = data.draw(st.integers(0, m - 1))
    sys = QuditSystem.uniform(d, m)
    total = sum(projector(k, w, sys) for k in range(d))
    np.testing.assert_array_equal(total, np.eye(d**m))
    assert set(np.unique(projector(0, w, sys).real)) <= {0.0, 1.0}


@given(s=st.tuples(seeds, seeds, seeds))
def test_tensor_associativity(s):
    a, b, c = random_unitary(2, s[0]), random_unitary(3, s[1]), random_unitary(2, s[2])
    np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), rtol=0, atol=1e-15)


def test_cphase_is_embedded_controlled_z():
    sys = QuditSystem.uniform(3, 2)
    expected = sum(embed(np.diag(np.eye(3)[k]), [0], sys) @ embed(np.linalg.matrix_power(pauli_z(3), k), [1], sys)
                   for k in range(3))
    np.testing.assert_allclose(cphase(3), expected, atol=1e-14)
