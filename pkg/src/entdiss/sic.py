"""
SIC-POVM vector sets in dimensions 2, 4 and 8.

Fiducial data files (`entdiss/data/sic_d<d>.txt`) hold one fiducial vector:
`#` comment lines, a `dim=<d>` header, then d lines of "<re> <im>" given to
at least 30 significant digits.  The components are used as printed, with
no renormalization.  The d=4 set is the orbit under the Weyl-Heisenberg
operators X^a Z^b, the d=8 set the orbit under the three-qubit Pauli
operators X^m Z^k.  Every loaded set must pass `verify_sic`.
"""

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np

from .linalg import PAULIS, pauli_digits, pauli_string
from .util import InternalError, UserError

SIC_TOL = 1e-9
SUPPORTED = (2, 4, 8)
FIDUCIAL_DIGITS = 30


@dataclass(frozen=True, eq=False)
class SicSet:
    dim: int
    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=complex)
        if v.shape != (self.dim**2, self.dim):
            raise ValueError(f"a SIC in dimension {self.dim} has {self.dim ** 2} vectors")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.dim**2


class SicReport(NamedTuple):
    overlap_deviation: float
    identity_deviation: float

    @property
    def ok(self) -> bool:
        return self.overlap_deviation < SIC_TOL and self.identity_deviation < SIC_TOL


def verify_sic(s: SicSet) -> SicReport:
    v = s.vectors
    d = s.dim
    gram = np.abs(v.conj() @ v.T) ** 2
    target = np.full(gram.shape, 1 / (d + 1))
    np.fill_diagonal(target, 1.0)
    frame = np.einsum("ia,ib->ab", v, v.conj()) / d
    return SicReport(
        float(np.max(np.abs(gram - target))),
        float(np.max(np.abs(frame - np.eye(d)))),
    )


def weyl_heisenberg(d: int) -> List[np.ndarray]:
    "X^a Z^b for a, b in Z_d"
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
        for a in range(d)
        for b in range(d)
    ]


def qubit_paulis(n: int) -> List[np.ndarray]:
    "X^m Z^k on n qubits, m, k in {0,1}^n"
    ops = []
    for m in product((0, 1), repeat=n):
        for k in product((0, 1), repeat=n):
            op = np.ones((1, 1), dtype=complex)
            for mi, ki in zip(m, k):
                factor = PAULIS[1 if mi else 0] @ PAULIS[3 if ki else 0]
                op = np.kron(op, factor)
            ops.append(op)
    return ops


def qubit_orbit_group(d: int) -> List[np.ndarray]:
    return qubit_paulis(d.bit_length() - 1)


ORBIT_GROUPS: Dict[int, Callable[[int], List[np.ndarray]]] = {
    4: weyl_heisenberg,
    8: qubit_orbit_group,
}


def orbit(fiducial: np.ndarray, group: List[np.ndarray]) -> np.ndarray:
    return np.array([g @ fiducial for g in group])


def significant_digits(token: str) -> int:
    "significant digits of a plain decimal; exact zeros count as fully precise"
    digits = token.lstrip("+-").replace(".", "").lstrip("0")
    return len(digits) if digits else FIDUCIAL_DIGITS


def read_fiducial(text: str) -> Tuple[int, np.ndarray]:
    dim = None
    numbers: List[complex] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("dim="):
            dim = int(line[4:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InternalError(f"malformed fiducial line {line!r}")
        short = [p for p in parts if significant_digits(p) < FIDUCIAL_DIGITS]
        if short:
            raise InternalError(
                f"fiducial component {short[0]} has fewer than {FIDUCIAL_DIGITS} digits"
            )
        numbers.append(complex(float(parts[0]), float(parts[1])))
    if dim is None or len(numbers) != dim:
        raise InternalError(f"malformed fiducial file: dim={dim}, {len(numbers)} components")
    return dim, np.array(numbers)



def qubit_fiducial() -> np.ndarray:
    "Bloch vector (1,1,1)/sqrt3"
    c = np.sqrt((3 + np.sqrt(3)) / 6)
    s = np.sqrt((3 - np.sqrt(3)) / 6)
    return np.array([c, np.exp(1j * np.pi / 4) * s])


@lru_cache(maxsize=None)
def sic_vectors(dim: int) -> SicSet:
    if dim not in SUPPORTED:
        raise UserError(f"Error: no SIC available in dimension {dim}; supported: {SUPPORTED}")
    if dim == 2:
        s = SicSet(2, orbit(qubit_fiducial(), weyl_heisenberg(2)))
    else:
        text = resources.files("entdiss").joinpath(f"data/sic_d{dim}.txt").read_text()
        d, psi = read_fiducial(text)
        if d != dim:
            raise InternalError(f"fiducial file for dimension {dim} declares dim={d}")
        s = SicSet(d, orbit(psi, ORBIT_GROUPS[d](d)))
    report = verify_sic(s)
    if not report.ok:
        raise InternalError(f"SIC in dimension {dim} failed verification: {report}")
    return s


def sic_transfer(s: SicSet) -> np.ndarray:
    """
    Pauli transfer matrix of the measure-and-prepare channel
    X -> (1/d) sum_i <psi_i|X|psi_i> |psi_i><psi_i| on log2(d) qubits,
    R[s, t] = tr(Pi_s Phi[Pi_t]) / d.
    """
    n = s.dim.bit_length() - 1
    strings = [pauli_string(p) for p in pauli_digits(n)]
    v = s.vectors
    # expectation of every Pauli string in every SIC vector: E[i, s]
    e = np.array([np.einsum("ia,ab,ib->i", v.conj(), p, v) for p in strings]).T
    return (e.T @ e).real / s.dim**2
