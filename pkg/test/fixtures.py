import os
import shutil
import textwrap
from pathlib import Path
from typing import List

import numpy as np
import pytest

from entdiss.cli import main
from entdiss.linalg import QOperator

__all__ = ["Workdir", "workdir", "rng", "full", "random_hermitian", "bell"]

full = pytest.mark.skipif(
    "ENTDISS_FULL" not in os.environ, reason="long reproduction; set ENTDISS_FULL to run"
)


class Workdir:

    def __init__(self, path: Path):
        self.path = path

    def __truediv__(self, rel: str) -> Path:
        return self.path / rel

    def run(self, *argv: str) -> int:
        "run the command line tool and return its exit status"
        args = list(argv)
        for flag in ("--out", "--cert-dir", "--config"):
            if flag in args:
                i = args.index(flag) + 1
                args[i] = str(self / args[i])
        if args and args[0] == "verify":
            args[-1] = str(self / args[-1])
        try:
            main(args)
        except SystemExit as e:
            return int(e.code or 0)
        raise AssertionError("main() returned without exiting")

    def w(self, filename: str, content: str):
        "write a file"
        with open(self / filename, "w") as f:
            f.write(textwrap.dedent(content).strip())
            f.write("\n")

    def r(self, filename: str) -> str:
        with open(self / filename, "r") as f:
            return f.read()

    def lines(self, filename: str) -> List[str]:
        return self.r(filename).strip().splitlines()


@pytest.fixture(scope="function")
def workdir(tmp_path: Path) -> Workdir:
    if "ENTDISS_TEMP_DIR" in os.environ:
        tmp_path = Path(os.environ["ENTDISS_TEMP_DIR"])
        shutil.rmtree(tmp_path, ignore_errors=True)
    os.makedirs(tmp_path, exist_ok=True)
    return Workdir(tmp_path)


@pytest.fixture(scope="function")
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def random_hermitian(rng: np.random.Generator, d: int, shift: float = 0.0) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2 + shift * np.eye(d)


def bell() -> QOperator:
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return QOperator(np.outer(psi, psi.conj()), True)
