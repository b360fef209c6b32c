from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Iterator, List, Sequence, Tuple

from .util import UserError

MAX_QUBITS = 12
LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

Part = Tuple[int, ...]


def _sort_key(parts: Sequence[Part]) -> Tuple:
    return (tuple(len(p) for p in parts), tuple(parts))


@dataclass(frozen=True)
class Partition:
    """
    A division of the qubit labels 1..n into parts.  Parts are sorted by
    size, then by their smallest label.
    """

    n: int
    parts: Tuple[Part, ...]

    def __post_init__(self) -> None:
        parts = tuple(sorted((tuple(sorted(p)) for p in self.parts), key=lambda p: (len(p), p)))
        labels = sorted(x for p in parts for x in p)
        if labels != list(range(1, self.n + 1)) or any(not p for p in parts):
            raise ValueError(f"{self.parts} does not partition 1..{self.n}")
        object.__setattr__(self, "parts", parts)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def render(self) -> str:
        return "|".join("".join(LABELS[x - 1] for x in p) for p in self.parts)

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> "Partition":
        parts = []
        for chunk in text.strip().split("|"):
            if not chunk or any(c not in LABELS for c in chunk):
                raise UserError(f"Error: bad partition {text!r}")
            parts.append(tuple(LABELS.index(c) + 1 for c in chunk))
        n = sum(len(p) for p in parts)
        try:
            return cls(n, tuple(parts))
        except ValueError as e:
            raise UserError(f"Error: bad partition {text!r}") from e


@dataclass(frozen=True)
class PartitionCatalog:
    n: int
    k: int
    entries: Tuple[Partition, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Partition]:
        return iter(self.entries)

    def __getitem__(self, j: int) -> Partition:
        "1-based, like P_j^k"
        if j < 1 or j > len(self.entries):
            raise IndexError(j)
        return self.entries[j - 1]

    def index(self, p: Partition) -> int:
        return self.entries.index(p) + 1


def _check_size(n: int) -> None:
    if n < 1 or n > MAX_QUBITS:
        raise UserError(f"Error: partitions are supported for 1..{MAX_QUBITS} qubits, not {n}")


def stirling2(n: int, k: int) -> int:
    if not 1 <= k <= n:
        raise ValueError(f"stirling2 needs 1 <= k <= n, got n={n} k={k}")
    return sum((-1) ** m * comb(k, m) * (k - m) ** n for m in range(k + 1)) // factorial(k)


def _set_partitions(labels: List[int], k: int) -> Iterator[List[List[int]]]:
    if k == 0:
        if not labels:
            yield []
        return
    if len(labels) < k:
        return
    first, rest = labels[0], labels[1:]
    for p in _set_partitions(rest, k - 1):
        yield [[first]] + p
    for p in _set_partitions(rest, k):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1 :]


def _catalog(n: int, k: int, partitions: Iterator[Sequence[Sequence[int]]]) -> PartitionCatalog:
    entries = sorted(
        (Partition(n, tuple(map(tuple, p))) for p in partitions), key=lambda p: _sort_key(p.parts)
    )
    return PartitionCatalog(n, k, tuple(entries))


def enumerate_partitions(n: int, k: int) -> PartitionCatalog:
    _check_size(n)
    stirling2(n, k)
    catalog = _catalog(n, k, _set_partitions(list(range(1, n + 1)), k))
    assert len(catalog) == stirling2(n, k)
    return catalog


def _require_even(n: int) -> None:
    _check_size(n)
    if n % 2:
        raise UserError(f"Error: {n} qubits cannot be split into equal halves or pairs")


def symmetric_bipartitions(n: int) -> PartitionCatalog:
    _require_even(n)
    labels = range(1, n + 1)
    halves = (c for c in combinations(labels, n // 2) if c[0] == 1)
    return _catalog(n, 2, ([c, [x for x in labels if x not in c]] for c in halves))


def _pairings(labels: List[int]) -> Iterator[List[List[int]]]:
    if not labels:
        yield []
        return
    first = labels[0]
    for i in range(1, len(labels)):
        rest = labels[1:i] + labels[i + 1 :]
        for p in _pairings(rest):
            yield [[first, labels[i]]] + p


def pair_partitions(n: int) -> PartitionCatalog:
    _require_even(n)
    return _catalog(n, n // 2, _pairings(list(range(1, n + 1))))


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out
