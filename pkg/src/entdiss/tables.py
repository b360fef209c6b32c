"""
Reference thresholds for the depolarizing channels, used to annotate `table`
output and as expected values in tests.

EA and class columns are largest q found for the decomposition; NPT columns
are the q above which the output is NPT.  `None` marks a cell that is not
defined (odd N for the pair and half classes, "all" rows for NPT) and
`NEVER` marks an output that is never NPT.
"""

from typing import Dict, Literal, NamedTuple, Tuple

from .channels import Noise
from .util import UserError

NEVER: Literal["never"] = "never"

Cell = float | None | Literal["never"]

COLUMNS = ("ea", "b", "c", "d", "dge", "npt1", "npt2")
CLASS_COLUMNS = COLUMNS[:5]
NPT_COLUMNS = COLUMNS[5:]


class Row(NamedTuple):
    n: int
    state: str
    cells: Tuple[Cell, ...]

    def cell(self, column: str) -> Cell:
        return self.cells[COLUMNS.index(column)]


_LOCAL = [
    Row(3, "ghz", (0.490, None, None, None, 0.713, 0.557, None)),
    Row(3, "w", (0.485, None, None, None, 0.686, 0.576, None)),
    Row(3, "upb", (0.698, None, None, None, 0.852, NEVER, None)),
    Row(3, "all", (0.477, None, None, None, 0.650, None, None)),
    Row(4, "ghz", (0.453, 0.548, 0.553, 0.548, 0.751, 0.578, 0.512)),
    Row(4, "w", (0.447, 0.473, 0.581, 0.473, 0.756, 0.585, 0.548)),
    Row(4, "cluster", (0.444, 0.478, 0.574, 0.478, 0.742, 0.532, 0.550)),
    Row(4, "all", (0.444, 0.472, 0.550, 0.472, 0.715, None, None)),
    Row(6, "ghz", (0.414, 0.433, 0.591, 0.530, 0.826, 0.638, 0.490)),
]

_GLOBAL = [
    Row(3, "ghz", (0.147, None, None, None, 0.402, 0.200, None)),
    Row(3, "w", (0.125, None, None, None, 0.317, 0.210, None)),
    Row(3, "upb", (0.400, None, None, None, 0.690, NEVER, None)),
    Row(3, "all", (0.111, None, None, None, 0.289, None, None)),
    Row(4, "ghz", (0.062, 0.202, 0.111, 0.202, 0.262, 0.112, 0.112)),
    Row(4, "w", (0.048, 0.123, 0.124, 0.123, 0.256, 0.127, 0.112)),
    Row(4, "cluster", (0.052, 0.123, 0.109, 0.123, 0.229, 0.112, 0.112)),
    Row(4, "all", (0.047, 0.121, 0.107, 0.121, 0.184, None, None)),
    Row(6, "ghz", (0.011, 0.034, 0.032, 0.046, 0.131, 0.031, 0.031)),
]

REFERENCE: Dict[Noise, list[Row]] = {Noise.LOCAL: _LOCAL, Noise.GLOBAL: _GLOBAL}

TABLE_NOISE = {"I": Noise.LOCAL, "II": Noise.GLOBAL}


def table_noise(which: str) -> Noise:
    try:
        return TABLE_NOISE[which.strip().upper()]
    except KeyError as e:
        raise UserError(f"Error: unknown table {which!r}; use I or II") from e


def rows(noise: Noise, *, max_n: int = 6) -> list[Row]:
    return [r for r in REFERENCE[noise] if r.n <= max_n]


def reference(noise: Noise, n: int, state: str, column: str) -> Cell:
    if column not in COLUMNS:
        raise UserError(f"Error: unknown column {column!r}")
    for r in REFERENCE[noise]:
        if r.n == n and r.state == state:
            return r.cell(column)
    return None


def render(cell: Cell) -> str:
    if cell is None:
        return "-"
    if cell == NEVER:
        return "never NPT"
    return f"{cell:.3f}"
