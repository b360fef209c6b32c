"""
Entanglement detectors for noisy outputs: the partial-transpose test across
a bipartition, and witnesses screened for block-positivity.
"""

from enum import Enum
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .channels import ChannelSpec, Noise, apply
from .linalg import PSD_TOL, QOperator, partial_transpose
from .partitions import Partition, enumerate_partitions
from .seesaw import DEFAULT_RESTARTS, block_positivity_heuristic
from .states import NamedState
from .util import UserError

NPT_TOL = 1e-12
GRID_POINTS = 101
NPT_RESOLUTION = 1e-4


class NptResult(NamedTuple):
    state: str
    noise: Noise
    partition: Partition
    q_threshold: float | None
    curve: List[Tuple[float, float]]

    @property
    def sizes(self) -> Tuple[int, ...]:
        return self.partition.sizes

    @property
    def never(self) -> bool:
        "no negative partial transpose anywhere in [0, 1]"
        return self.q_threshold is None

    def describe(self) -> str:
        if self.q_threshold is None:
            return "never NPT"
        return f"{self.q_threshold:.4f}"


def _require_bipartition(n: int, partition: Partition) -> None:
    if partition.k != 2:
        raise UserError(f"Error: {partition} is not a bipartition")
    if partition.n != n:
        raise UserError(f"Error: {partition} does not cover {n} qubits")


def pt_min_eigenvalue(state: NamedState, noise: Noise, partition: Partition, q: float) -> float:
    out = apply(ChannelSpec(noise, state.n_qubits, q), state.rho)
    pt = partial_transpose(out, partition.parts[0])
    return float(np.linalg.eigvalsh(pt.entries)[0])


def npt_threshold(
    state: NamedState,
    noise: Noise,
    partition: Partition,
    *,
    resolution: float = NPT_RESOLUTION,
    grid: int = GRID_POINTS,
) -> NptResult:
    """
    Smallest q in [0, 1] above which the partial transpose of the noisy
    state, taken on the partition's first part, has a negative eigenvalue.
    """
    _require_bipartition(state.n_qubits, partition)
    curve = []
    first = None
    for q in np.linspace(0.0, 1.0, grid):
        lam = pt_min_eigenvalue(state, noise, partition, float(q))
        curve.append((float(q), lam))
        if first is None and lam < -NPT_TOL:
            first = len(curve) - 1
    if first is None:
        return NptResult(state.spec, noise, partition, None, curve)
    if first == 0:
        return NptResult(state.spec, noise, partition, 0.0, curve)
    lo, hi = curve[first - 1][0], curve[first][0]
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if pt_min_eigenvalue(state, noise, partition, mid) < -NPT_TOL:
            hi = mid
        else:
            lo = mid
    return NptResult(state.spec, noise, partition, (lo + hi) / 2, curve)


def cuts_of_shape(n: int, sizes: Sequence[int]) -> List[Partition]:
    "every bipartition of n qubits with the given part sizes"
    want = tuple(sorted(sizes))
    if len(want) != 2 or sum(want) != n or min(want) < 1:
        raise UserError(f"Error: no bipartition of {n} qubits has sizes {list(sizes)}")
    return [p for p in enumerate_partitions(n, 2) if p.sizes == want]


def npt_all_cuts(
    state: NamedState, noise: Noise, sizes: Sequence[int], resolution: float = NPT_RESOLUTION
) -> List[NptResult]:
    return [
        npt_threshold(state, noise, p, resolution=resolution)
        for p in cuts_of_shape(state.n_qubits, sizes)
    ]


def npt_min_over_cuts(
    state: NamedState, noise: Noise, sizes: Sequence[int], resolution: float = NPT_RESOLUTION
) -> NptResult:
    """
    The cut that turns NPT first: the output is entangled as soon as any
    cut of this shape is NPT.
    """
    results = npt_all_cuts(state, noise, sizes, resolution)
    found = [r for r in results if r.q_threshold is not None]
    if not found:
        return results[0]
    return min(found, key=lambda r: r.q_threshold or 0.0)


def ghz_global_npt_threshold(n: int) -> float:
    """
    Closed form for GHZ under global noise: on any cut the partial transpose
    has smallest eigenvalue (1 - q)/2^n - q/2, which vanishes here.
    """
    return 1 / (1 + 2 ** (n - 1))


def negativity(rho: QOperator, partition: Partition) -> float:
    "sum of the absolute values of the negative eigenvalues of the partial transpose"
    _require_bipartition(rho.n_qubits, partition)
    w = np.linalg.eigvalsh(partial_transpose(rho, partition.parts[0]).entries)
    return float(-w[w < -NPT_TOL].sum())


class Verdict(Enum):
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"


class WitnessResult(NamedTuple):
    verdict: Verdict
    expectation: float
    screen: float


def witness_check(
    rho_out: QOperator,
    xi: QOperator,
    partition: Partition,
    *,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> WitnessResult:
    """
    A block-positive xi with tr(rho_out xi) < 0 shows rho_out is not
    separable with respect to `partition`.  Block-positivity is only
    screened, so an ENTANGLED verdict is as good as that screen.
    """
    if not xi.hermitian:
        raise ValueError("witness must be Hermitian")
    if xi.dim != rho_out.dim:
        raise UserError(f"Error: witness of dimension {xi.dim} for a state of {rho_out.dim}")
    screen = block_positivity_heuristic(xi.entries, partition, restarts=restarts, seed=seed)
    value = float(np.real(np.trace(rho_out.entries @ xi.entries)))
    if screen.value >= -PSD_TOL and value < -PSD_TOL:
        return WitnessResult(Verdict.ENTANGLED, value, screen.value)
    return WitnessResult(Verdict.INCONCLUSIVE, value, screen.value)
