import numpy as np
import pytest

from entdiss.linalg import (
    QOperator,
    characteristic_coeffs,
    contract,
    from_pauli,
    is_psd,
    ket,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    permute_qubits,
    projector,
    psd_by_coeffs,
    tensor,
    to_pauli,
    to_pauli_direct,
)
from entdiss.states import ghz

from .fixtures import bell, random_hermitian, rng

_ = rng


def test_operator_validation():
    with pytest.raises(ValueError):
        QOperator(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        QOperator(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        QOperator(np.array([[0, 1], [0, 0]]), True)
    x = QOperator(np.eye(4))
    assert x.n_qubits == 2
    assert not x.entries.flags.writeable


def test_pauli_single_qubit():
    t = to_pauli(QOperator(projector(ket("0")), True))
    assert np.allclose(t.coeffs, [0.5, 0, 0, 0.5])
    t = to_pauli(QOperator(np.array([[0, 1], [0, 0]])))
    # sigma+ = (X + iY)/2
    assert np.allclose(t.coeffs, [0, 0.5, 0.5j, 0])


def test_pauli_fast_matches_direct(rng: np.random.Generator):
    for n in (1, 2, 3):
        a = QOperator(random_hermitian(rng, 2**n), True)
        assert np.allclose(to_pauli(a).coeffs, to_pauli_direct(a).coeffs, atol=1e-12)
        g = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        b = QOperator(g)
        assert np.allclose(to_pauli(b).coeffs, to_pauli_direct(b).coeffs, atol=1e-12)
        assert from_pauli(to_pauli(b)).close_to(b)


def test_pauli_qubit_one_most_significant():
    # Z on qubit 1, I on qubit 2
    z1 = np.kron(np.diag([1, -1]), np.eye(2))
    t = to_pauli(QOperator(z1, True))
    # qubit 1 is the most significant base-4 digit
    assert abs(t.coeffs[4 * 3 + 0] - 1) < 1e-12
    assert abs(t.coeffs[4 * 0 + 3]) < 1e-12


def test_partial_trace_ghz():
    rho = ghz(3).rho
    assert partial_trace(rho, [1]).close_to(QOperator(np.eye(2) / 2))
    two = partial_trace(rho, [1, 3])
    assert two.close_to(QOperator((projector(ket("00")) + projector(ket("11"))) / 2))


def test_partial_transpose_bell():
    w = np.linalg.eigvalsh(partial_transpose(bell(), [1]).entries)
    assert np.allclose(w, [-0.5, 0.5, 0.5, 0.5])
    assert partial_transpose(partial_transpose(bell(), [2]), [2]).close_to(bell())


def test_tensor_and_permute():
    a = QOperator(projector(ket("0")), True)
    b = QOperator(projector(ket("1")), True)
    ab = tensor(a, b)
    assert ab.close_to(QOperator(projector(ket("01"))))
    assert permute_qubits(ab, [2, 1]).close_to(QOperator(projector(ket("10"))))
    with pytest.raises(ValueError):
        permute_qubits(ab, [1, 1])


def test_contract():
    out = contract(bell(), [1], ket("0"))
    assert out.close_to(QOperator(projector(ket("0")) / 2))
    out = contract(bell(), [2], ket("1"))
    assert out.close_to(QOperator(projector(ket("1")) / 2))
    with pytest.raises(ValueError):
        contract(bell(), [3], ket("0"))


def test_characteristic_coeffs():
    c = characteristic_coeffs(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(c, [1, 6, 11, 6])


def test_psd_paths_agree(rng: np.random.Generator):
    decided = {d: 0 for d in (2, 4, 8, 16)}
    checked = 0
    while checked < 1200:
        d = int(rng.choice(list(decided)))
        a = random_hermitian(rng, d, shift=float(rng.uniform(0, 3 * np.sqrt(d))))
        lam = np.linalg.eigvalsh(a)[0]
        if abs(lam) < 1e-6:
            continue
        assert is_psd(a) == (lam >= 0)
        fast = psd_by_coeffs(a)
        if fast is not None:
            assert fast == (lam >= 0)
            decided[d] += 1
        checked += 1
    # the recurrence may abstain near zero, but never for every matrix
    assert all(count > 0 for count in decided.values())


def test_psd_boundary():
    assert is_psd(projector(ket("01")))
    assert is_psd(np.diag([1.0, -1e-12]))
    assert not is_psd(np.diag([1.0, -1e-6]))


def test_psd_rejects_non_hermitian():
    with pytest.raises(ValueError):
        is_psd(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[0, 1], [0, 0]]))
