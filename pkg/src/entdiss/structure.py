"""
Decomposition classes (a)-(e), their diagonal maps and the positivity
constraints those maps must satisfy.

Every class is a sum of elementary blocks.  A block keeps one part of the
register, measures each remaining part with a SIC and re-prepares it, and is
preceded by the diagonal map Xi, which multiplies the coefficient of each
Pauli string by f(s, t).  Here (s, t) is the string's zero-count profile:
s counts identities on the block's `first` qubits, t on all the others.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations, product
from math import comb, factorial
from typing import Dict, List, Literal, NamedTuple, Sequence, Tuple

import numpy as np

from .channels import ChannelSpec, Noise, pauli_transfer
from .linalg import (
    QOperator,
    pauli_coeffs,
    pauli_digits,
    pauli_matrix,
    pauli_string,
    permute_legs,
)
from .partitions import double_factorial, pair_partitions, symmetric_bipartitions
from .sic import sic_vectors
from .states import is_fully_symmetric
from .util import UserError

Profile = Tuple[int, int]

ALL: Literal["all"] = "all"


class ClassTag(Enum):
    EA = "a"
    PAIR_CLUSTERS = "b"
    HALF_PLUS_SINGLES = "c"
    HALF_CLUSTERS = "d"
    ONE_DETACHED = "e"


CLASS_NAMES = {
    ClassTag.EA: "ea",
    ClassTag.PAIR_CLUSTERS: "b",
    ClassTag.HALF_PLUS_SINGLES: "c",
    ClassTag.HALF_CLUSTERS: "d",
    ClassTag.ONE_DETACHED: "dge",
}

_ALIASES = {
    "ea": ClassTag.EA,
    "pairs": ClassTag.PAIR_CLUSTERS,
    "halfsingles": ClassTag.HALF_PLUS_SINGLES,
    "halves": ClassTag.HALF_CLUSTERS,
    "dge": ClassTag.ONE_DETACHED,
}


class Block(NamedTuple):
    "zero-based qubit indices"

    kept: Tuple[int, ...]
    measured: Tuple[Tuple[int, ...], ...]
    first: Tuple[int, ...]
    weight: float


@dataclass(frozen=True)
class DissociationClass:
    tag: ClassTag
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise UserError(f"Error: dissociation classes need at least 3 qubits, got {self.n}")
        if self.tag in (ClassTag.EA, ClassTag.ONE_DETACHED):
            return
        if self.n % 2:
            raise UserError(
                f"Error: class {self.name} splits the register into halves or pairs "
                f"and needs an even number of qubits, got {self.n}"
            )

    @classmethod
    def parse(cls, name: str, n: int) -> "DissociationClass":
        key = name.strip().lower()
        if key in _ALIASES:
            return cls(_ALIASES[key], n)
        try:
            return cls(ClassTag(key), n)
        except ValueError as e:
            raise UserError(f"Error: unknown class {name!r}; use ea, b, c, d or dge") from e

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.tag]

    @property
    def target_k(self) -> int:
        n = self.n
        return {
            ClassTag.EA: n,
            ClassTag.PAIR_CLUSTERS: n // 2,
            ClassTag.HALF_PLUS_SINGLES: n // 2 + 1,
            ClassTag.HALF_CLUSTERS: 2,
            ClassTag.ONE_DETACHED: 2,
        }[self.tag]

    @property
    def target_r(self) -> int:
        n = self.n
        return {
            ClassTag.EA: 1,
            ClassTag.PAIR_CLUSTERS: 2,
            ClassTag.HALF_PLUS_SINGLES: n // 2,
            ClassTag.HALF_CLUSTERS: n // 2,
            ClassTag.ONE_DETACHED: n - 1,
        }[self.tag]

    @property
    def first_size(self) -> int:
        "number of qubits counted by the first profile coordinate"
        if self.tag in (ClassTag.EA, ClassTag.ONE_DETACHED):
            return 1
        if self.tag is ClassTag.PAIR_CLUSTERS:
            return 2
        return self.n // 2

    def profile_domain(self) -> List[Profile]:
        a = self.first_size
        return [(s, t) for s in range(a + 1) for t in range(self.n - a + 1)]

    def blocks(self) -> List[Block]:
        return _blocks(self.tag, self.n)


@lru_cache(maxsize=None)
def _blocks(tag: ClassTag, n: int) -> List[Block]:
    everyone = range(n)
    out = []
    if tag is ClassTag.EA:
        for m in everyone:
            out.append(Block((m,), tuple((t,) for t in everyone if t != m), (m,), 1 / n))
    elif tag is ClassTag.ONE_DETACHED:
        for m in everyone:
            out.append(Block(tuple(t for t in everyone if t != m), ((m,),), (m,), 1 / n))
    elif tag is ClassTag.PAIR_CLUSTERS:
        weight = 1 / (comb(n, 2) * double_factorial(n - 3))
        for p in pair_partitions(n):
            pairs = [tuple(x - 1 for x in part) for part in p.parts]
            for kept in pairs:
                rest = tuple(q for q in pairs if q != kept)
                out.append(Block(kept, rest, kept, weight))
    elif tag is ClassTag.HALF_PLUS_SINGLES:
        for kept in combinations(everyone, n // 2):
            singles = tuple(t for t in everyone if t not in kept)
            out.append(Block(kept, tuple((t,) for t in singles), singles, 1 / comb(n, n // 2)))
    else:
        for p in symmetric_bipartitions(n):
            a, b = (tuple(x - 1 for x in part) for part in p.parts)
            for kept, measured in ((b, a), (a, b)):
                out.append(Block(kept, (measured,), measured, 1 / comb(n, n // 2)))
    return out


@lru_cache(maxsize=None)
def block_profiles(block: Block, n: int) -> np.ndarray:
    "(4^n, 2) zero-count profile of every Pauli string"
    zeros = pauli_digits(n) == 0
    first = np.zeros(n, dtype=bool)
    first[list(block.first)] = True
    prof = np.stack([zeros[:, first].sum(axis=1), zeros[:, ~first].sum(axis=1)], axis=1)
    prof.setflags(write=False)
    return prof


def _pairing_factor(r: int, pairs: int) -> float:
    """
    Average of 5^-(pairs touched) when r marked points are spread over a
    uniformly random perfect matching of 2*pairs points.
    """
    u = 2 * pairs - r
    if u < 0:
        return 0.0
    total = 0.0
    for fused in range(r // 2 + 1):
        lone = r - 2 * fused
        if lone > u:
            continue
        count = (
            comb(r, 2 * fused)
            * double_factorial(2 * fused - 1)
            * factorial(u) // factorial(u - lone)
            * double_factorial(u - lone - 1)
        )
        total += count * 5.0 ** -(r - fused)
    return total / double_factorial(2 * pairs - 1)


def _row(cls: DissociationClass, n1: int) -> Dict[Profile, float]:
    "coefficients of the equation for Pauli weight n1"
    n = cls.n
    z = n - n1
    row: Dict[Profile, float] = {}

    def put(s: int, t: int, c: float) -> None:
        if c != 0:
            row[(s, t)] = row.get((s, t), 0.0) + c

    if cls.tag is ClassTag.EA:
        if n1 > 0:
            put(0, z, n1 / (3 ** (n1 - 1) * n))
        if z > 0:
            put(1, z - 1, z / (3**n1 * n))
    elif cls.tag is ClassTag.ONE_DETACHED:
        if n1 > 0:
            put(0, z, n1 / (3 * n))
        if z > 0:
            put(1, z - 1, z / n)
    elif cls.tag is ClassTag.PAIR_CLUSTERS:
        for s in range(3):
            count = comb(n1, 2 - s) * comb(z, s)
            if count:
                put(s, z - s, count * _pairing_factor(n1 - 2 + s, (n - 2) // 2) / comb(n, 2))
    else:
        h = n // 2
        for l in range(h + 1):
            count = comb(n1, h - l) * comb(z, l)
            if not count or z - l < 0:
                continue
            if cls.tag is ClassTag.HALF_PLUS_SINGLES:
                damp = 3.0 ** -(h - l)
            else:
                damp = 1.0 if l == h else 1 / (2**h + 1)
            put(l, z - l, count * damp / comb(n, h))
    return row


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """
    One equation per Pauli weight n1 = 0..n: the decomposition must scale
    weight-n1 strings exactly as the target channel does.
    """

    cls: DissociationClass
    noise: Noise
    unknowns: Tuple[Profile, ...]
    matrix: np.ndarray

    @property
    def rows(self) -> List[Dict[Profile, float]]:
        return [
            {p: float(c) for p, c in zip(self.unknowns, row) if c != 0} for row in self.matrix
        ]

    def rhs(self, q: float) -> np.ndarray:
        ch = ChannelSpec(self.noise, self.cls.n, q)
        return np.array([pauli_transfer(ch, k) for k in range(self.cls.n + 1)])

    def vector(self, f: Dict[Profile, float]) -> np.ndarray:
        return np.array([f.get(p, 0.0) for p in self.unknowns])

    def residual(self, f: Dict[Profile, float], q: float) -> float:
        return float(np.max(np.abs(self.matrix @ self.vector(f) - self.rhs(q))))


def build_system(cls: DissociationClass, noise: Noise) -> LinearSystem:
    rows = [_row(cls, n1) for n1 in range(cls.n + 1)]
    unknowns = tuple(sorted({p for row in rows for p in row}))
    matrix = np.array([[row.get(p, 0.0) for p in unknowns] for row in rows])
    return LinearSystem(cls, noise, unknowns, matrix)


@dataclass(frozen=True, eq=False)
class DiagonalMapFamily:
    cls: DissociationClass
    f: Dict[Profile, float]

    def table(self) -> np.ndarray:
        a = self.cls.first_size
        out = np.zeros((a + 1, self.cls.n - a + 1))
        for (s, t), v in self.f.items():
            out[s, t] = v
        return out

    def multipliers(self, block: Block) -> np.ndarray:
        prof = block_profiles(block, self.cls.n)
        return self.table()[prof[:, 0], prof[:, 1]]


def xi_operator(fam: DiagonalMapFamily, block: int, rho: QOperator) -> QOperator:
    n = fam.cls.n
    b = fam.cls.blocks()[block]
    out = pauli_matrix(pauli_coeffs(rho.entries, n) * fam.multipliers(b), n)
    return QOperator(out, rho.hermitian)


def profile_terms(
    cls: DissociationClass, block: Block, unknowns: Sequence[Profile], x: np.ndarray
) -> np.ndarray:
    "(K, d, d): the part of Xi[x] carried by each unknown's strings, so Xi[x] = sum f_p terms[p]"
    n = cls.n
    c = pauli_coeffs(x, n)
    prof = block_profiles(block, n)
    masks = [(prof[:, 0] == s) & (prof[:, 1] == t) for s, t in unknowns]
    return np.array([pauli_matrix(np.where(mask, c, 0), n) for mask in masks])


def measurement_vectors(block: Block) -> Tuple[List[Tuple[int, ...]], np.ndarray]:
    "every SIC choice for the block's measured parts and the product vector it selects"
    sets = [sic_vectors(2 ** len(part)).vectors for part in block.measured]
    choices = list(product(*(range(len(s)) for s in sets)))
    vectors = []
    for choice in choices:
        v = np.ones(1, dtype=complex)
        for s, i in zip(sets, choice):
            v = np.kron(v, s[i])
        vectors.append(v)
    return choices, np.array(vectors)


def contract_terms(terms: np.ndarray, n: int, block: Block, vectors: np.ndarray) -> np.ndarray:
    "(C, K, m, m): each term sandwiched between every measurement vector"
    measured = [q for part in block.measured for q in part]
    order = measured + list(block.kept)
    dt, dk = 2 ** len(measured), 2 ** len(block.kept)
    arranged = np.array([permute_legs(t, n, order) for t in terms]).reshape(-1, dt, dk, dt, dk)
    return np.einsum("ca,pakbl,cb->cpkl", vectors.conj(), arranged, vectors, optimize=True)


def product_clone_parties(block: Block, n: int) -> List[Tuple[int, ...]]:
    "block-positivity parties on (S, S'): the block's parts, then all clones together"
    return [block.kept, *block.measured, tuple(range(n, 2 * n))]


def choi_terms(cls: DissociationClass, block: Block, unknowns: Sequence[Profile]) -> np.ndarray:
    "(K, 4^n, 4^n): Choi matrix of each profile's share of Xi"
    n = cls.n
    d = 2**n
    prof = block_profiles(block, n)
    out = np.zeros((len(unknowns), d * d, d * d), dtype=complex)
    index = {p: i for i, p in enumerate(unknowns)}
    for digits, (s, t) in zip(pauli_digits(n), prof):
        i = index.get((int(s), int(t)))
        if i is None:
            continue
        p = pauli_string(digits)
        out[i] += np.kron(p, p.T)
    return out / d**2


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """
    State mode: `matrices[c]` is the (K, m, m) stack whose f-weighted sum is
    constraint c, labelled by (block id, SIC choice).

    ALL mode: `choi` is the (K, 4^n, 4^n) stack whose f-weighted sum is the
    Choi matrix of Xi for block `block`, which must be block-positive with
    respect to `parties`.
    """

    cls: DissociationClass
    unknowns: Tuple[Profile, ...]
    mode: Literal["state", "all"]
    labels: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    matrices: np.ndarray | None = None
    deduplicated: bool = False
    block: int = 0
    choi: np.ndarray | None = None
    parties: Tuple[Tuple[int, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        "dimension of each constraint matrix"
        if self.matrices is None:
            return 0
        return self.matrices.shape[-1]

    def evaluate(self, f: np.ndarray) -> np.ndarray:
        assert self.matrices is not None
        return np.einsum("p,cpkl->ckl", f, self.matrices)


def constraint_set(
    cls: DissociationClass,
    unknowns: Sequence[Profile],
    rho: "QOperator | Literal['all']",
    *,
    dedup: bool = True,
    workers: int = 1,
) -> ConstraintSet:
    blocks = cls.blocks()
    unknowns = tuple(unknowns)
    if isinstance(rho, str):
        if rho != ALL:
            raise ValueError(f"unknown input marker {rho!r}")
        b = blocks[0]
        return ConstraintSet(
            cls,
            unknowns,
            "all",
            choi=choi_terms(cls, b, unknowns),
            parties=tuple(product_clone_parties(b, cls.n)),
        )

    n = cls.n
    if rho.n_qubits != n:
        raise UserError(f"Error: state has {rho.n_qubits} qubits, class is for {n}")
    ids = list(range(len(blocks)))
    symmetric = dedup and is_fully_symmetric(rho.entries, n)
    if symmetric:
        ids = ids[:1]

    def one(i: int) -> Tuple[List[Tuple[int, Tuple[int, ...]]], np.ndarray]:
        b = blocks[i]
        choices, vectors = measurement_vectors(b)
        terms = profile_terms(cls, b, unknowns, rho.entries)
        return [(i, c) for c in choices], contract_terms(terms, n, b, vectors)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(one, ids))
    labels = tuple(label for ls, _ in parts for label in ls)
    matrices = np.concatenate([m for _, m in parts])
    return ConstraintSet(cls, unknowns, "state", labels, matrices, symmetric)


def product_state_terms(
    cls: DissociationClass, cons: ConstraintSet, vectors: Sequence[np.ndarray]
) -> np.ndarray:
    """
    (K, d, d) stack for Xi[|a><a|] with a the product of `vectors`, one per
    system party of `cons.parties`.
    """
    n = cls.n
    system = cons.parties[:-1]
    a = np.ones(1, dtype=complex)
    for v in vectors:
        a = np.kron(a, v)
    order = [q for part in system for q in part]
    pi = permute_legs(np.outer(a, a.conj()), n, list(np.argsort(order)))
    return profile_terms(cls, cls.blocks()[cons.block], cons.unknowns, pi)
