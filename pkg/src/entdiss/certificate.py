"""
Feasibility certificates and their JSON form:

    {
      "tool": "entdiss",
      "version": "0.1.0",
      "class": "ea",              # ea, b, c, d or dge
      "n": 3,
      "noise": "local",           # local or global
      "state": "ghz",             # a state name accepted by the CLI, or "all"
      "mode": "state",            # "state", or "all" for block-positivity certificates
      "q": 0.49,
      "f": [[s, t, value], ...],  # the diagonal map's zero-count profile table
      "residuals": {...},         # as measured when the certificate was issued
      "solver": {...}             # engine, seed, wall time
    }
"""

import json
from dataclasses import dataclass, field
from typing import IO, Any, Dict, Self

from . import __version__
from .channels import Noise
from .structure import DiagonalMapFamily, DissociationClass, Profile
from .util import UserError

TOOL = "entdiss"


@dataclass
class FeasibilityCertificate:
    cls_name: str
    n: int
    noise: str
    q: float
    state: str
    f: Dict[Profile, float]
    mode: str = "state"
    residuals: Dict[str, float] = field(default_factory=dict)
    solver: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    @property
    def cls(self) -> DissociationClass:
        return DissociationClass.parse(self.cls_name, self.n)

    @property
    def noise_kind(self) -> Noise:
        return Noise.parse(self.noise)

    @property
    def family(self) -> DiagonalMapFamily:
        return DiagonalMapFamily(self.cls, dict(self.f))

    @property
    def heuristic(self) -> bool:
        return self.mode == "all"

    def to_json(self) -> Dict[str, Any]:
        return {
            "tool": TOOL,
            "version": self.version,
            "class": self.cls_name,
            "n": self.n,
            "noise": self.noise,
            "state": self.state,
            "mode": self.mode,
            "q": self.q,
            "f": [[s, t, v] for (s, t), v in sorted(self.f.items())],
            "residuals": self.residuals,
            "solver": self.solver,
        }

    @classmethod
    def from_json(cls, j: Dict[str, Any]) -> Self:
        try:
            if j["tool"] != TOOL:
                raise UserError(f"Error: not an {TOOL} certificate")
            cert = cls(
                cls_name=str(j["class"]),
                n=int(j["n"]),
                noise=str(j["noise"]),
                q=float(j["q"]),
                state=str(j["state"]),
                f={(int(s), int(t)): float(v) for s, t, v in j["f"]},
                mode=str(j.get("mode", "state")),
                residuals={k: float(v) for k, v in j.get("residuals", {}).items()},
                solver=dict(j.get("solver", {})),
                version=str(j.get("version", "")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise UserError(f"Error: malformed certificate: {e}") from e
        if cert.mode not in ("state", "all"):
            raise UserError(f"Error: malformed certificate: unknown mode {cert.mode!r}")
        # validates the class/parity pair and the noise name
        _ = cert.cls, cert.noise_kind
        return cert

    def dump(self, f: IO) -> None:
        json.dump(self.to_json(), f, indent=2)
        f.write("\n")

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def load(cls, f: IO) -> Self:
        try:
            j = json.load(f)
        except json.JSONDecodeError as e:
            raise UserError(f"Error: certificate is not valid JSON: {e}") from e
        if not isinstance(j, dict):
            raise UserError("Error: malformed certificate")
        return cls.from_json(j)

    @classmethod
    def loads(cls, s: str) -> Self:
        try:
            j = json.loads(s)
        except json.JSONDecodeError as e:
            raise UserError(f"Error: certificate is not valid JSON: {e}") from e
        if not isinstance(j, dict):
            raise UserError("Error: malformed certificate")
        return cls.from_json(j)
