from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Tuple

import numpy as np

from .linalg import (
    PAULIS,
    QOperator,
    contract_legs,
    min_eigenvalue,
    pauli_coeffs,
    pauli_matrix,
    pauli_weights,
    permute_legs,
    projector,
)
from .sic import sic_vectors
from .states import DensityMatrix
from .util import InternalError, UserError


class Noise(Enum):
    LOCAL = "local"
    GLOBAL = "global"

    @classmethod
    def parse(cls, name: str) -> "Noise":
        try:
            return cls(name.strip().lower())
        except ValueError as e:
            raise UserError(f"Error: unknown noise {name!r}; use local or global") from e


@dataclass(frozen=True)
class ChannelSpec:
    """
    Depolarizing channel q*Id + (1-q)*Tr, either on each qubit separately
    (LOCAL) or on the whole register (GLOBAL).
    """

    kind: Noise
    n_qubits: int
    q: float

    @property
    def lower_cpt_bound(self) -> float:
        d = 2 if self.kind is Noise.LOCAL else 2**self.n_qubits
        return -1 / (d * d - 1)


def pauli_transfer(ch: ChannelSpec, weight: int) -> float:
    if not 0 <= weight <= ch.n_qubits:
        raise ValueError(f"weight {weight} out of range for {ch.n_qubits} qubits")
    if ch.kind is Noise.LOCAL:
        return ch.q**weight
    return 1.0 if weight == 0 else ch.q


def transfer_vector(ch: ChannelSpec) -> np.ndarray:
    "multiplier of every Pauli string, in coefficient order"
    table = np.array([pauli_transfer(ch, k) for k in range(ch.n_qubits + 1)])
    return table[pauli_weights(ch.n_qubits)]


def apply(ch: ChannelSpec, rho: QOperator) -> DensityMatrix:
    n = ch.n_qubits
    if rho.n_qubits != n:
        raise ValueError(f"channel on {n} qubits applied to {rho.n_qubits} qubits")
    out = pauli_matrix(pauli_coeffs(rho.entries, n) * transfer_vector(ch), n)
    out = (out + out.conj().T) / 2
    if abs(np.trace(out) - rho.trace()) > 1e-10:
        raise InternalError("depolarizing channel did not preserve the trace")
    return DensityMatrix(out, getattr(rho, "label", ""))


def apply_kraus(ch: ChannelSpec, rho: QOperator) -> np.ndarray:
    "the same map through Pauli mixtures, one qubit at a time for local noise"
    n = ch.n_qubits
    a = rho.entries
    if ch.kind is Noise.GLOBAL:
        return ch.q * a + (1 - ch.q) * np.trace(a) * np.eye(2**n) / 2**n
    keep, flip = (1 + 3 * ch.q) / 4, (1 - ch.q) / 4
    for t in range(n):
        out = keep * a
        for p in PAULIS[1:]:
            k = np.kron(np.kron(np.eye(2**t), p), np.eye(2 ** (n - t - 1)))
            out = out + flip * (k @ a @ k.conj().T)
        a = out
    return a


def choi_of_map(fn: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """
    (fn x Id)(|Psi+><Psi+|) on qubits (S, S'), Psi+ = d^-1/2 sum_i |i>|i> in
    the computational basis.
    """
    d = 2**n
    omega = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            omega += np.kron(fn(e), e)
    return omega / d


def choi(ch: ChannelSpec) -> QOperator:
    n = ch.n_qubits
    return QOperator(
        choi_of_map(lambda e: pauli_matrix(pauli_coeffs(e, n) * transfer_vector(ch), n), n), True
    )


def interleave_legs(omega: np.ndarray, n: int) -> np.ndarray:
    "(1..N, 1'..N') ordering to (1, 1', 2, 2', ...)"
    return permute_legs(omega, 2 * n, [ax for k in range(n) for ax in (k, n + k)])


def is_cpt(ch: ChannelSpec) -> bool:
    in_range = ch.lower_cpt_bound - 1e-12 <= ch.q <= 1 + 1e-12
    if ch.n_qubits <= 3:
        margin = min(abs(ch.q - ch.lower_cpt_bound), abs(ch.q - 1))
        psd = min_eigenvalue(choi(ch)) >= -1e-12
        if psd != in_range and margin > 1e-9:
            raise InternalError(f"CPT range and Choi positivity disagree for {ch}")
    return in_range


@dataclass(frozen=True, eq=False)
class EBBlock:
    """
    Measure-and-prepare operations weight_i |psi_i><psi_i| X |psi_i><psi_i|
    on `target_qubits` (1-based, in the order the vectors' tensor factors use).
    """

    target_qubits: Tuple[int, ...]
    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        d = 2 ** len(self.target_qubits)
        frame = np.einsum("i,ia,ib->ab", self.weights, self.vectors, self.vectors.conj())
        if np.max(np.abs(frame - np.eye(d))) > 1e-10:
            raise ValueError("measurement vectors do not resolve the identity")


def sic_block(targets: Sequence[int]) -> EBBlock:
    s = sic_vectors(2 ** len(targets))
    return EBBlock(tuple(targets), s.vectors, np.full(len(s), 1 / s.dim))


def eb_apply(block: EBBlock, choice: int, x: QOperator) -> QOperator:
    n = x.n_qubits
    targets = [t - 1 for t in block.target_qubits]
    rest = [i for i in range(n) if i not in targets]
    psi = block.vectors[choice]
    kept = contract_legs(x.entries, n, targets, psi)
    # qubit j of `out` is original qubit (targets + rest)[j]
    out = block.weights[choice] * np.kron(projector(psi), kept)
    return QOperator(permute_legs(out, n, np.argsort(targets + rest)), x.hermitian)


def eb_sum(block: EBBlock, x: QOperator) -> QOperator:
    out = sum(eb_apply(block, i, x).entries for i in range(len(block.weights)))
    return QOperator(np.asarray(out), x.hermitian)
