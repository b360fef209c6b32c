"""
Independent re-verification of feasibility certificates.

Nothing the solver computed is reused.  The decomposition's Pauli transfer
is expanded from the blocks and the numerical SIC vectors, not from
`build_system`, and every constraint matrix is rebuilt one at a time from
`xi_operator`.
"""

from dataclasses import dataclass
from typing import Dict, NamedTuple

import numpy as np

from .certificate import FeasibilityCertificate
from .channels import ChannelSpec, choi_of_map, transfer_vector
from .linalg import PSD_TOL, QOperator, contract, min_eigenvalue, pauli_digits
from .seesaw import DEFAULT_RESTARTS, block_positivity_heuristic
from .sic import sic_transfer, sic_vectors
from .states import parse_state
from .structure import (
    ALL,
    build_system,
    measurement_vectors,
    product_clone_parties,
    xi_operator,
)

TRANSFER_TOL = 1e-8
EQUATION_TOL = 1e-10


class Tolerances(NamedTuple):
    transfer: float = TRANSFER_TOL
    equations: float = EQUATION_TOL
    eigenvalue: float = PSD_TOL


@dataclass
class VerificationReport:
    transfer_residual: float
    sic_offdiagonal: float
    equation_residual: float
    worst_eigenvalue: float
    constraints_checked: int
    block_positivity: float | None = None
    tolerances: Tolerances = Tolerances()

    @property
    def ok(self) -> bool:
        tol = self.tolerances
        ok = (
            self.transfer_residual < tol.transfer
            and self.sic_offdiagonal < tol.transfer
            and self.equation_residual < tol.equations
            and self.worst_eigenvalue >= -tol.eigenvalue
        )
        if self.block_positivity is not None:
            ok = ok and self.block_positivity >= -tol.eigenvalue
        return ok

    def as_dict(self) -> Dict[str, float]:
        out = {
            "transfer_residual": self.transfer_residual,
            "sic_offdiagonal": self.sic_offdiagonal,
            "equation_residual": self.equation_residual,
            "worst_eigenvalue": self.worst_eigenvalue,
        }
        if self.block_positivity is not None:
            out["block_positivity"] = self.block_positivity
        return out

    def __str__(self) -> str:
        lines = [f"{k}: {v:.3e}" for k, v in self.as_dict().items()]
        lines.append(f"constraints_checked: {self.constraints_checked}")
        lines.append("valid" if self.ok else "INVALID")
        return "\n".join(lines)


def _part_index(digits: np.ndarray, part: tuple) -> np.ndarray:
    idx = np.zeros(len(digits), dtype=int)
    for q in part:
        idx = 4 * idx + digits[:, q]
    return idx


def decomposition_transfer(cert: FeasibilityCertificate) -> tuple[np.ndarray, float]:
    """
    The multiplier the certified decomposition applies to every Pauli
    string, and the largest off-diagonal Pauli transfer of any SIC
    measure-and-prepare channel it uses.
    """
    fam = cert.family
    n = cert.n
    digits = pauli_digits(n)
    total = np.zeros(4**n)
    offdiagonal = 0.0
    transfers: Dict[int, np.ndarray] = {}
    for block in fam.cls.blocks():
        mult = block.weight * fam.multipliers(block)
        for part in block.measured:
            d = 2 ** len(part)
            if d not in transfers:
                r = sic_transfer(sic_vectors(d))
                offdiagonal = max(offdiagonal, float(np.max(np.abs(r - np.diag(np.diag(r))))))
                transfers[d] = np.diag(r)
            mult = mult * transfers[d][_part_index(digits, part)]
        total += mult
    return total, offdiagonal


def _worst_constraint(cert: FeasibilityCertificate, rho: QOperator) -> tuple[float, int]:
    fam = cert.family
    worst = np.inf
    count = 0
    for i, block in enumerate(fam.cls.blocks()):
        xi = xi_operator(fam, i, rho)
        targets = [q + 1 for part in block.measured for q in part]
        _, vectors = measurement_vectors(block)
        for v in vectors:
            worst = min(worst, min_eigenvalue(contract(xi, targets, v)))
            count += 1
    return float(worst), count


def verify_certificate(
    cert: FeasibilityCertificate,
    rho: QOperator | None = None,
    *,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    tolerances: Tolerances = Tolerances(),
) -> VerificationReport:
    cls = cert.cls
    noise = cert.noise_kind
    target = transfer_vector(ChannelSpec(noise, cert.n, cert.q))
    total, offdiagonal = decomposition_transfer(cert)
    transfer_residual = float(np.max(np.abs(total - target)))
    equation_residual = build_system(cls, noise).residual(cert.f, cert.q)

    if cert.mode == "all" or cert.state == ALL:
        fam = cert.family
        block = cls.blocks()[0]
        omega = choi_of_map(lambda e: xi_operator(fam, 0, QOperator(e)).entries, cert.n)
        screen = block_positivity_heuristic(
            omega, product_clone_parties(block, cert.n), restarts=restarts, seed=seed
        )
        return VerificationReport(
            transfer_residual,
            offdiagonal,
            equation_residual,
            screen.value,
            screen.restarts,
            screen.value,
            tolerances,
        )

    if rho is None:
        rho = parse_state(cert.state, cert.n).rho
    worst, count = _worst_constraint(cert, rho)
    return VerificationReport(
        transfer_residual, offdiagonal, equation_residual, worst, count, None, tolerances
    )
