"""
Seesaw search for the smallest expectation of a Hermitian operator over
product vectors.  A nonnegative result is evidence, not proof, that the
operator is block-positive.
"""

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .linalg import permute_legs, qubit_count
from .partitions import Partition

DEFAULT_RESTARTS = 200
_BRA = "abcdefghijklm"
_KET = "nopqrstuvwxyz"


class SeesawReport(NamedTuple):
    value: float
    vectors: List[np.ndarray]
    parties: Tuple[Tuple[int, ...], ...]
    restarts: int


def _parties(partition: "Partition | Sequence[Sequence[int]]", n: int) -> List[Tuple[int, ...]]:
    "zero-based parties; Partition labels are 1-based, raw sequences zero-based"
    if isinstance(partition, Partition):
        if partition.n != n:
            raise ValueError(f"partition of {partition.n} labels for {n} qubits")
        return [tuple(x - 1 for x in p) for p in partition.parts]
    parties = [tuple(p) for p in partition]
    if sorted(q for p in parties for q in p) != list(range(n)):
        raise ValueError(f"{parties} does not cover qubits 0..{n - 1}")
    return parties


def _effective(tensor: np.ndarray, vectors: List[np.ndarray], m: int) -> np.ndarray:
    k = len(vectors)
    operands: List[np.ndarray] = [tensor]
    subscripts = [_BRA[:k] + _KET[:k]]
    for j, v in enumerate(vectors):
        if j == m:
            continue
        operands += [v.conj(), v]
        subscripts += [_BRA[j], _KET[j]]
    e = np.einsum(",".join(subscripts) + "->" + _BRA[m] + _KET[m], *operands, optimize=True)
    return (e + e.conj().T) / 2


def _descend(
    tensor: np.ndarray, vectors: List[np.ndarray], sweeps: int, tol: float
) -> Tuple[float, List[np.ndarray]]:
    value = np.inf
    for _ in range(sweeps):
        previous = value
        for m in range(len(vectors)):
            w, v = np.linalg.eigh(_effective(tensor, vectors, m))
            vectors[m] = v[:, 0]
            value = float(w[0])
        if previous - value < tol:
            break
    return value, vectors


def block_positivity_heuristic(
    omega: np.ndarray,
    partition: "Partition | Sequence[Sequence[int]]",
    *,
    restarts: int = DEFAULT_RESTARTS,
    sweeps: int = 200,
    seed: int = 0,
) -> SeesawReport:
    """
    Minimize <phi_1 ... phi_k| omega |phi_1 ... phi_k> by alternately
    replacing each phi_j with the lowest eigenvector of its effective
    operator, from `restarts` random starting points.
    """
    omega = np.asarray(omega, dtype=complex)
    n = qubit_count(omega.shape[0])
    parties = _parties(partition, n)
    if len(parties) > len(_BRA):
        raise ValueError(f"at most {len(_BRA)} parties supported")
    order = [q for p in parties for q in p]
    dims = [2 ** len(p) for p in parties]
    tensor = permute_legs(omega, n, order).reshape(dims + dims)
    rng = np.random.default_rng(seed)
    best = np.inf
    best_vectors: List[np.ndarray] = []
    for _ in range(max(1, restarts)):
        start = []
        for d in dims:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            start.append(v / np.linalg.norm(v))
        value, vectors = _descend(tensor, start, sweeps, 1e-13)
        if value < best:
            best, best_vectors = value, list(vectors)
    return SeesawReport(best, best_vectors, tuple(parties), max(1, restarts))
