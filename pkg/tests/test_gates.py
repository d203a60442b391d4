import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qudit_ct.gates import (
    PhaseConvention,
    controlled,
    csum,
    fourier,
    gaussian,
    ghz_state,
    identify_pauli_power,
    max_state,
    mpow,
    named_gate,
    pauli_x,
    pauli_y,
    pauli_z,
    random_unitary,
)
from qudit_ct.tensor import QuditSystem, embed, is_unitary, tensor

ALL_D = range(2, 8)


def inv(a):
    return a.conj().T


def test_pauli_x_qubit():
    np.testing.assert_array_equal(pauli_x(2), [[0, 1], [1, 0]])


def test_pauli_z_qubit():
    np.testing.assert_allclose(pauli_z(2), np.diag([1, -1]), atol=1e-16)


def test_qutrit_commutation_by_hand():
    w = np.exp(2j * np.pi / 3)
    # written out independently of the module's constructors
    x = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
    z = np.diag([1, w, w * w])
    np.testing.assert_allclose(pauli_x(3), x)
    np.testing.assert_allclose(pauli_z(3), z, atol=1e-15)
    np.testing.assert_allclose(z @ x, w * x @ z, atol=1e-15)


def test_fourier_qubit_is_hadamard():
    np.testing.assert_allclose(fourier(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-16)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_fourier_conjugates_x_to_z(d):
    f = fourier(d)
    np.testing.assert_allclose(f @ pauli_x(d) @ inv(f), pauli_z(d), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_gaussian_conjugates_x_to_y_inverse(d):
    g = gaussian(d)
    np.testing.assert_allclose(g @ pauli_x(d) @ inv(g), inv(pauli_y(d)), atol=1e-12)


def test_gaussian_qubit():
    # zeta = exp(i*pi*3/2) = -i under the package convention; zeta**2 = -1 = omega
    zeta = PhaseConvention(2).zeta
    assert zeta == pytest.approx(-1j, abs=1e-15)
    assert zeta**2 == pytest.approx(-1, abs=1e-15)
    np.testing.assert_allclose(gaussian(2), np.diag([1, zeta]), atol=1e-15)


@pytest.mark.parametrize("d", ALL_D)
def test_gaussian_unit_modulus(d):
    np.testing.assert_allclose(np.abs(np.diag(gaussian(d))), 1, atol=1e-15)
    assert np.count_nonzero(gaussian(d) - np.diag(np.diag(gaussian(d)))) == 0


@pytest.mark.parametrize("d", ALL_D)
def test_phase_convention(d):
    pc = PhaseConvention(d)
    assert abs(pc.omega) == pytest.approx(1, abs=1e-15)
    assert abs(pc.zeta) == pytest.approx(1, abs=1e-15)
    assert pc.zeta**2 == pytest.approx(pc.omega, abs=1e-12)
    assert pc.zeta ** (d * d) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("d", ALL_D)
def test_gate_set_invariants(d):
    x, z, f = pauli_x(d), pauli_z(d), fourier(d)
    w = np.exp(2j * np.pi / d)
    for k in range(d):
        e = np.eye(d)[k]
        np.testing.assert_array_equal(x @ e, np.eye(d)[(k + 1) % d])
        np.testing.assert_allclose(z @ e, w**k * e, atol=1e-12)
    np.testing.assert_allclose(z @ x, w * x @ z, atol=1e-12)
    np.testing.assert_allclose(mpow(x, d), np.eye(d), atol=1e-12)
    np.testing.assert_allclose(mpow(z, d), np.eye(d), atol=1e-12)
    np.testing.assert_allclose(mpow(f, 4), np.eye(d), atol=1e-12)
    neg = np.zeros((d, d))
    for k in range(d):
        neg[(-k) % d, k] = 1
    np.testing.assert_allclose(f @ f, neg, atol=1e-12)
    for u in (x, z, f, gaussian(d), pauli_y(d)):
        assert is_unitary(u)


@pytest.mark.parametrize("d", ALL_D)
def test_y_is_a_generalized_pauli(d):
    y = pauli_y(d)
    found = []
    for a, b in itertools.product((1, -1), repeat=2):
        cand = mpow(pauli_x(d), a) @ mpow(pauli_z(d), b)
        phase = np.vdot(cand, y) / d
        if abs(abs(phase) - 1) < 1e-12 and np.max(np.abs(y - phase * cand)) < 1e-12:
            found.append((a, b))
    assert found, "Y is not a unit-phase multiple of X^a Z^b"


def test_controlled_qubit_examples():
    i2, x, z = np.eye(2), pauli_x(2), pauli_z(2)
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(controlled([i2, x]), cnot)
    np.testing.assert_allclose(controlled([i2, z]), np.diag([1, 1, 1, -1]), atol=1e-16)


def test_controlled_qutrit_shift_columns():
    x = pauli_x(3)
    c = controlled([np.eye(3), x, x @ x])
    # column for |a, b> must be |a, a + b>
    for a, b in itertools.product(range(3), repeat=2):
        col = np.zeros(9)
        col[3 * a + (a + b) % 3] = 1
        np.testing.assert_array_equal(c[:, 3 * a + b], col)
    np.testing.assert_array_equal(c, csum(3))


def test_controlled_errors():
    with pytest.raises(Exception):
        controlled([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        controlled([np.eye(2), 2 * np.eye(2)])


def test_max_state_examples():
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(max_state(2, 2).amplitudes, [s, 0, 0, s])
    t = 1 / np.sqrt(3)
    exp = np.zeros(9)
    exp[[0, 5, 7]] = t  # |00>, |12>, |21>
    np.testing.assert_allclose(max_state(3, 2).amplitudes, exp)
    exp = np.zeros(8)
    exp[[0, 3, 5, 6]] = 0.5  # |000>, |011>, |101>, |110>
    np.testing.assert_allclose(max_state(2, 3).amplitudes, exp)


def test_ghz_state_examples():
    exp = np.zeros(8)
    exp[[0, 7]] = 1 / np.sqrt(2)
    np.testing.assert_allclose(ghz_state(2, 3).amplitudes, exp)
    exp = np.zeros(9)
    exp[[0, 4, 8]] = 1 / np.sqrt(3)
    np.testing.assert_allclose(ghz_state(3, 2).amplitudes, exp)


def test_ghz_is_fourier_of_max_three_shares():
    f = fourier(2)
    np.testing.assert_allclose(tensor(f, f, f) @ max_state(2, 3).amplitudes, ghz_state(2, 3).amplitudes, atol=1e-12)


def test_state_errors():
    with pytest.raises(ValueError):
        max_state(2, 1)
    with pytest.raises(ValueError):
        ghz_state(3, 1)
    with pytest.raises(ValueError):
        pauli_x(1)
    with pytest.raises(ValueError):
        fourier(0)


def test_random_unitary_examples():
    u = random_unitary(4, 11)
    np.testing.assert_allclose(inv(u) @ u, np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(u, random_unitary(4, 11))
    assert np.max(np.abs(u - random_unitary(4, 12))) > 1e-6
    with pytest.raises(ValueError):
        random_unitary(0, 1)


def test_named_gates():
    np.testing.assert_array_equal(named_gate("X^-1", 3), pauli_x(3).T)
    np.testing.assert_allclose(named_gate("F^-1", 5) @ fourier(5), np.eye(5), atol=1e-12)
    assert identify_pauli_power(inv(pauli_z(3)), 3) == "Z^2"
    assert identify_pauli_power(pauli_x(5), 5) == "X"
    assert identify_pauli_power(fourier(3), 3) is None
    with pytest.raises(KeyError):
        named_gate("H", 2)


# --- properties ---------------------------------------------------------------


@given(d=st.integers(2, 7), seed=st.integers(0, 2**32 - 1), k=st.integers(1, 2))
def test_controlled_is_z_compressed(d, seed, k):
    blocks = [random_unitary(d**k, seed + ell) for ell in range(d)]
    c = controlled(blocks)
    zc = embed(pauli_z(d), [0], QuditSystem.uniform(d, k + 1))
    np.testing.assert_allclose(c @ zc, zc @ c, atol=1e-12)


@given(d=st.integers(2, 7), shares=st.integers(2, 4))
def test_max_state_support(d, shares):
    if d**shares > 4096:
        return
    amps = max_state(d, shares).amplitudes
    for idx, digits in enumerate(itertools.product(range(d), repeat=shares)):
        if sum(digits) % d == 0:
            assert amps[idx] == d ** ((1 - shares) / 2)
        else:
            assert amps[idx] == 0


@given(dim=st.integers(1, 12), seed=st.integers(0, 2**63 - 1))
def test_random_unitary_is_unitary_with_positive_r(dim, seed):
    u = random_unitary(dim, seed)
    assert is_unitary(u, 1e-12)
    _, r = np.linalg.qr(u)
    assert np.all(np.abs(np.abs(np.diag(r)) - 1) < 1e-10)
