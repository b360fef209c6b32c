"""
Dense operators on qubit registers.

Qubits are labelled 1..N in the public functions, qubit 1 being the most
significant tensor factor.  Pauli strings are indexed by their digits
(i_1 ... i_N), i_t in {0,1,2,3} for (I, X, Y, Z), with i_1 most significant,
and `to_pauli` uses the normalization coeffs[s] = 2^-N tr(Pi_s X).
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, List, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# forward and inverse single-qubit change of basis, acting on a leg index 2*row+col
_TO_PAULI = PAULIS.transpose(0, 2, 1).reshape(4, 4)
_FROM_PAULI = PAULIS.reshape(4, 4).T


def qubit_count(dim: int) -> int:
    if dim < 1 or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


@dataclass(frozen=True, eq=False)
class QOperator:
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
        qubit_count(a.shape[0])
        if self.hermitian and not np.allclose(a, a.conj().T, atol=HERMITIAN_TOL, rtol=0):
            raise ValueError("operator flagged Hermitian is not Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_qubits(self) -> int:
        return qubit_count(self.dim)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def close_to(self, other: "QOperator", tol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(
            np.max(np.abs(self.entries - other.entries), initial=0.0) <= tol
        )


@dataclass(frozen=True, eq=False)
class PauliTable:
    n_qubits: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs)
        if c.shape != (4**self.n_qubits,):
            raise ValueError(f"expected {4 ** self.n_qubits} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


@lru_cache(maxsize=None)
def pauli_digits(n: int) -> np.ndarray:
    "(4^n, n) array of string digits, rows in coefficient order"
    if n == 0:
        return np.zeros((1, 0), dtype=int)
    d = np.array(list(product(range(4), repeat=n)), dtype=int)
    d.setflags(write=False)
    return d


@lru_cache(maxsize=None)
def pauli_weights(n: int) -> np.ndarray:
    w = np.count_nonzero(pauli_digits(n), axis=1)
    w.setflags(write=False)
    return w


def pauli_string(digits: Sequence[int]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for d in digits:
        out = np.kron(out, PAULIS[d])
    return out


def _as_array(x: "QOperator | np.ndarray") -> np.ndarray:
    return x.entries if isinstance(x, QOperator) else np.asarray(x, dtype=complex)


def _zero_based(labels: Iterable[int], n: int) -> List[int]:
    out = sorted(set(labels))
    if any(t < 1 or t > n for t in out):
        raise ValueError(f"qubit labels {out} out of range 1..{n}")
    return [t - 1 for t in out]


def tensor(a: QOperator, b: QOperator, *rest: QOperator) -> QOperator:
    out = np.kron(a.entries, b.entries)
    for r in rest:
        out = np.kron(out, r.entries)
    return QOperator(out, all(x.hermitian for x in (a, b, *rest)))


def trace_out(a: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    "partial trace on raw arrays, `keep` zero-based"
    keep = sorted(keep)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = [letters[i] for i in range(n)]
    cols = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, a.reshape((2,) * (2 * n)))
    d = 2 ** len(keep)
    return np.asarray(t).reshape(d, d)


def partial_trace(x: QOperator, keep: Iterable[int]) -> QOperator:
    n = x.n_qubits
    return QOperator(trace_out(x.entries, n, _zero_based(keep, n)), x.hermitian)


def transpose_legs(a: np.ndarray, n: int, subset: Sequence[int]) -> np.ndarray:
    axes = list(range(2 * n))
    for i in subset:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    d = 2**n
    return a.reshape((2,) * (2 * n)).transpose(axes).reshape(d, d)


def partial_transpose(x: QOperator, subset: Iterable[int]) -> QOperator:
    n = x.n_qubits
    return QOperator(transpose_legs(x.entries, n, _zero_based(subset, n)), x.hermitian)


def permute_legs(a: np.ndarray, n: int, order: Sequence[int]) -> np.ndarray:
    "new qubit j is old qubit order[j], zero-based"
    order = list(order)
    d = 2**n
    axes = order + [n + o for o in order]
    return a.reshape((2,) * (2 * n)).transpose(axes).reshape(d, d)


def permute_qubits(x: QOperator, order: Sequence[int]) -> QOperator:
    n = x.n_qubits
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"{list(order)} is not a permutation of 1..{n}")
    return QOperator(permute_legs(x.entries, n, [o - 1 for o in order]), x.hermitian)


def _along_legs(t: np.ndarray, matrix: np.ndarray, n: int) -> np.ndarray:
    for k in range(n):
        t = np.moveaxis(np.tensordot(matrix, t, axes=([1], [k])), 0, k)
    return t


def pauli_coeffs(a: np.ndarray, n: int) -> np.ndarray:
    "2^-n tr(Pi_s a) for every string s, one leg at a time"
    interleave = [ax for k in range(n) for ax in (k, n + k)]
    t = a.reshape((2,) * (2 * n)).transpose(interleave).reshape((4,) * n)
    return _along_legs(t, _TO_PAULI, n).reshape(4**n) / 2**n


def pauli_matrix(coeffs: np.ndarray, n: int) -> np.ndarray:
    t = _along_legs(np.asarray(coeffs, dtype=complex).reshape((4,) * n), _FROM_PAULI, n)
    d = 2**n
    split = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return t.reshape((2,) * (2 * n)).transpose(split).reshape(d, d)


def to_pauli(x: QOperator) -> PauliTable:
    n = x.n_qubits
    c = pauli_coeffs(x.entries, n)
    if x.hermitian or np.allclose(x.entries, x.entries.conj().T, atol=HERMITIAN_TOL, rtol=0):
        c = c.real
    return PauliTable(n, c)


def to_pauli_direct(x: QOperator) -> PauliTable:
    "coefficient by coefficient, O(16^N); kept as an oracle for `to_pauli`"
    n = x.n_qubits
    c = np.array(
        [np.trace(pauli_string(s) @ x.entries) / 2**n for s in pauli_digits(n)], dtype=complex
    )
    if np.allclose(x.entries, x.entries.conj().T, atol=HERMITIAN_TOL, rtol=0):
        c = c.real
    return PauliTable(n, c)


def from_pauli(t: PauliTable) -> QOperator:
    m = pauli_matrix(t.coeffs, t.n_qubits)
    return QOperator(m, not np.iscomplexobj(t.coeffs))


def _require_hermitian(a: np.ndarray) -> None:
    if not np.allclose(a, a.conj().T, atol=1e-10, rtol=0):
        raise ValueError("expected a Hermitian operator")


def characteristic_coeffs(a: np.ndarray) -> np.ndarray:
    """
    Elementary symmetric functions C_0..C_d of the eigenvalues, from power
    traces via C_k = (1/k) sum_{l=1}^{k} (-1)^(l-1) C_(k-l) tr(X^l).
    """
    d = a.shape[0]
    traces = np.empty(d + 1)
    power = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        power = power @ a
        traces[k] = np.trace(power).real
    c = np.zeros(d + 1)
    c[0] = 1.0
    for k in range(1, d + 1):
        c[k] = sum((-1) ** (l - 1) * c[k - l] * traces[l] for l in range(1, k + 1)) / k
    return c


def psd_by_coeffs(a: np.ndarray, tol: float = PSD_TOL) -> bool | None:
    """
    Decide X + tol*I >= 0 from the characteristic coefficients.  Returns
    None when some coefficient is too close to zero to be trusted.
    """
    d = a.shape[0]
    y = a + tol * np.eye(d)
    c = characteristic_coeffs(y)
    scale = max(float(np.linalg.norm(y)), 1e-300)
    margin = np.array([1e-10 * comb(d, k) * scale**k for k in range(d + 1)])
    if np.all(c >= margin):
        return True
    if np.any(c <= -margin):
        return False
    return None


def is_psd(x: "QOperator | np.ndarray", tol: float = PSD_TOL) -> bool:
    a = _as_array(x)
    _require_hermitian(a)
    if a.shape[0] <= 16:
        fast = psd_by_coeffs(a, tol)
        if fast is not None:
            return fast
    return bool(np.linalg.eigvalsh(a)[0] >= -tol)


def min_eigenvalue(x: "QOperator | np.ndarray") -> float:
    a = _as_array(x)
    _require_hermitian(a)
    return float(np.linalg.eigvalsh(a)[0])


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2) if bits else 0] = 1
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def contract_legs(a: np.ndarray, n: int, targets: Sequence[int], vector: np.ndarray) -> np.ndarray:
    """
    <psi|_T a |psi>_T for a vector psi on the zero-based qubits `targets`
    (in the order given); the rest keep their relative order.
    """
    rest = [i for i in range(n) if i not in targets]
    dt, dk = 2 ** len(targets), 2 ** len(rest)
    b = permute_legs(a, n, list(targets) + rest).reshape(dt, dk, dt, dk)
    return np.einsum("a,akbl,b->kl", np.conj(vector), b, vector)


def contract(x: QOperator, targets: Sequence[int], vector: np.ndarray) -> QOperator:
    n = x.n_qubits
    t = [q - 1 for q in targets]
    if len(set(t)) != len(t) or any(q < 0 or q >= n for q in t):
        raise ValueError(f"bad target qubits {list(targets)}")
    return QOperator(contract_legs(x.entries, n, t, vector), x.hermitian)
