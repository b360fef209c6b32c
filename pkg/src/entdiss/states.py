from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Sequence

import numpy as np

from .linalg import QOperator, ket, permute_legs, projector
from .util import UserError

TRACE_TOL = 1e-12


class DensityMatrix(QOperator):
    "Hermitian, unit-trace operator on N qubits"

    label: str

    def __init__(self, entries: np.ndarray, label: str = "") -> None:
        super().__init__(entries, True)
        object.__setattr__(self, "label", label)
        if abs(self.trace() - 1) > 1e-10:
            raise ValueError(f"density matrix {label!r} has trace {self.trace()}")


class StateName(Enum):
    GHZ = "ghz"
    W = "w"
    CLUSTER4 = "cluster"
    UPB3 = "upb"
    MAX_MIXED = "maxmixed"
    RANDOM = "random"


@dataclass(frozen=True, eq=False)
class NamedState:
    name: StateName
    n_qubits: int
    rho: DensityMatrix
    seed: int | None = None

    @property
    def spec(self) -> str:
        "the string `parse_state` accepts for this state"
        if self.name is StateName.RANDOM:
            return f"random:{self.seed}"
        return self.name.value


def _pure(name: StateName, psi: np.ndarray, label: str) -> NamedState:
    psi = psi / np.linalg.norm(psi)
    n = len(psi).bit_length() - 1
    return NamedState(name, n, DensityMatrix(projector(psi), label))


def _require_n(n: int, what: str) -> None:
    if n < 2:
        raise UserError(f"Error: {what} needs at least 2 qubits, got {n}")


def ghz(n: int) -> NamedState:
    _require_n(n, "GHZ")
    return _pure(StateName.GHZ, ket("0" * n) + ket("1" * n), f"GHZ_{n}")


def w(n: int) -> NamedState:
    _require_n(n, "W")
    psi = sum(ket("0" * i + "1" + "0" * (n - i - 1)) for i in range(n))
    return _pure(StateName.W, np.asarray(psi), f"W_{n}")


def cluster4() -> NamedState:
    psi = ket("0000") + ket("0011") + ket("1100") - ket("1111")
    return _pure(StateName.CLUSTER4, psi, "Cl_4")


_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
_ZERO = ket("0")
_ONE = ket("1")


def _product(*vs: np.ndarray) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vs:
        out = np.kron(out, v)
    return out


def upb3() -> NamedState:
    "the bound entangled state (I - P_UPB)/4 of the shifts product basis"
    upb = [
        _product(_ZERO, _ONE, _PLUS),
        _product(_ONE, _PLUS, _ZERO),
        _product(_PLUS, _ZERO, _ONE),
        _product(_MINUS, _MINUS, _MINUS),
    ]
    p = sum(projector(v) for v in upb)
    return NamedState(StateName.UPB3, 3, DensityMatrix((np.eye(8) - p) / 4, "UPB_3"))


def max_mixed(n: int) -> NamedState:
    d = 2**n
    return NamedState(StateName.MAX_MIXED, n, DensityMatrix(np.eye(d) / d, f"I_{n}"))


def random_density(n: int, seed: int) -> NamedState:
    "reduced state of a Gaussian random pure state on n+n qubits"
    if not 1 <= n <= 6:
        raise UserError(f"Error: random states are supported for 1..6 qubits, got {n}")
    rng = np.random.default_rng(seed)
    d = 2**n
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return NamedState(
        StateName.RANDOM, n, DensityMatrix(rho / np.trace(rho).real, f"random_{n}_{seed}"), seed
    )


def parse_state(spec: str, n: int) -> NamedState:
    spec = spec.strip().lower()
    if spec.startswith("random:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError as e:
            raise UserError(f"Error: bad random seed in {spec!r}") from e
        return random_density(n, seed)
    if spec == "ghz":
        return ghz(n)
    if spec == "w":
        return w(n)
    if spec == "maxmixed":
        return max_mixed(n)
    if spec == "cluster":
        if n != 4:
            raise UserError("Error: the cluster state is defined for 4 qubits")
        return cluster4()
    if spec == "upb":
        if n != 3:
            raise UserError("Error: the UPB state is defined for 3 qubits")
        return upb3()
    raise UserError(f"Error: unknown state {spec!r}")


def is_invariant(rho: np.ndarray, n: int, order: Sequence[int], tol: float = 1e-12) -> bool:
    "is rho unchanged by relabelling its qubits (zero-based `order`)?"
    return bool(np.max(np.abs(permute_legs(rho, n, order) - rho), initial=0.0) <= tol)


def is_fully_symmetric(rho: np.ndarray, n: int, tol: float = 1e-12) -> bool:
    "invariance under all of S_n, checked on the adjacent transpositions that generate it"
    for i in range(n - 1):
        order = list(range(n))
        order[i], order[i + 1] = order[i + 1], order[i]
        if not is_invariant(rho, n, order, tol):
            return False
    return True


def all_permutations_invariant(rho: np.ndarray, n: int, tol: float = 1e-12) -> bool:
    "brute force version of `is_fully_symmetric`, for small n"
    return all(is_invariant(rho, n, p, tol) for p in permutations(range(n)))
