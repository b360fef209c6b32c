"""
Feasibility of the positivity constraints in the free f-parameters, and
bisection for the largest noise parameter q with a certificate.

For fixed q the equalities A f = b(q) are solved as f = f0(q) + B z with B a
null-space basis.  Every constraint is affine in z, so the search maximizes
the worst constraint eigenvalue over z, either as a semidefinite program
("sdp") or by multi-start Nelder-Mead ("multistart").  Whatever the engine
returns is only accepted after a numpy eigenvalue check and, in
`max_threshold`, after `verify_certificate`.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, NamedTuple, Tuple

import cvxpy as cp
import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .certificate import FeasibilityCertificate
from .channels import Noise
from .linalg import PSD_TOL
from .seesaw import DEFAULT_RESTARTS, block_positivity_heuristic
from .states import NamedState
from .structure import (
    ALL,
    ConstraintSet,
    DissociationClass,
    LinearSystem,
    build_system,
    constraint_set,
    product_state_terms,
)
from .util import InternalError, UserError, log_step
from .verify import VerificationReport, verify_certificate

Engine = Literal["sdp", "multistart"]

Z_BOUND = 1e4
MULTISTART_STARTS = 32
ALL_MAX_QUBITS = 4
ALL_INITIAL_CUTS = 24
ALL_MAX_ROUNDS = 40
ALL_SCREEN_RESTARTS = 40


class Infeasible(NamedTuple):
    q: float
    margin: float
    reason: str


def _real_embedding(m: np.ndarray) -> np.ndarray:
    "Hermitian H = A + iB is PSD iff [[A, -B], [B, A]] is"
    top = np.concatenate([m.real, -m.imag], axis=-1)
    bottom = np.concatenate([m.imag, m.real], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


class SdpSearch:
    """
    maximize t  s.t.  sum_p (f0 + B z)_p G_cp - t I >= 0 for every c,
    with f0 a parameter so one compiled problem serves every q.
    """

    def __init__(self, matrices: np.ndarray, basis: np.ndarray) -> None:
        emb = _real_embedding(matrices)
        count, k_unknowns, r, _ = emb.shape
        k = basis.shape[1]
        self.f0 = cp.Parameter(k_unknowns)
        self.t = cp.Variable()
        self.z = cp.Variable(k) if k else None
        constraints = [self.t <= 1]
        if self.z is not None:
            constraints.append(cp.norm(self.z, "inf") <= Z_BOUND)
        eye = np.eye(r).reshape(-1)
        for c in range(count):
            lin = emb[c].reshape(k_unknowns, r * r).T
            vec = lin @ self.f0 - self.t * eye
            if self.z is not None:
                vec = vec + (lin @ basis) @ self.z
            y = cp.Variable((r, r), PSD=True)
            constraints.append(cp.vec(y) == vec)
        self.problem = cp.Problem(cp.Maximize(self.t), constraints)

    def solve(self, f0: np.ndarray) -> Tuple[float, np.ndarray] | None:
        self.f0.value = f0
        try:
            self.problem.solve()
        except cp.error.SolverError:
            return None
        if self.problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return None
        z = np.zeros(0) if self.z is None else np.asarray(self.z.value, dtype=float)
        return float(self.t.value), z


def _margin(m0: np.ndarray, mi: np.ndarray, z: np.ndarray) -> float:
    m = m0 + np.tensordot(z, mi, axes=1) if len(z) else m0
    return float(np.linalg.eigvalsh(m)[:, 0].min())


def multistart_search(
    m0: np.ndarray, mi: np.ndarray, *, seed: int = 0, starts: int = MULTISTART_STARTS
) -> Tuple[float, np.ndarray]:
    "best worst-eigenvalue found from `starts` deterministic Nelder-Mead runs"
    k = mi.shape[0]
    best_z = np.zeros(k)
    best = _margin(m0, mi, best_z)
    if k == 0:
        return best, best_z
    rng = np.random.default_rng(seed)
    for i in range(starts):
        if best >= 0:
            break
        z0 = best_z if i == 0 else best_z + rng.normal(scale=1.0 + np.abs(best_z).max(), size=k)
        fit = minimize(
            lambda z: -_margin(m0, mi, z),
            z0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000 * k},
        )
        if -fit.fun > best:
            best, best_z = -fit.fun, np.asarray(fit.x)
    return best, best_z


@dataclass
class Problem:
    "the q-independent pieces of one feasibility question"

    system: LinearSystem
    cons: ConstraintSet
    state: str
    engine: Engine = "sdp"
    seed: int = 0
    basis: np.ndarray = field(init=False)
    _sdp: SdpSearch | None = field(init=False, default=None)
    _cuts: List[np.ndarray] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.basis = scipy.linalg.null_space(self.system.matrix)

    def particular(self, q: float) -> np.ndarray:
        b = self.system.rhs(q)
        f0, *_ = scipy.linalg.lstsq(self.system.matrix, b)
        if np.max(np.abs(self.system.matrix @ f0 - b)) > 1e-10:
            raise InternalError(f"inconsistent equality system for {self.system.cls} at q={q}")
        return f0

    def certificate(self, q: float, f: np.ndarray, **residuals: float) -> FeasibilityCertificate:
        cls = self.system.cls
        return FeasibilityCertificate(
            cls_name=cls.name,
            n=cls.n,
            noise=self.system.noise.value,
            q=q,
            state=self.state,
            f={p: float(v) for p, v in zip(self.system.unknowns, f)},
            mode=self.cons.mode,
            residuals=dict(residuals),
            solver={"engine": self.engine, "seed": self.seed},
        )


def _search(
    problem: Problem, matrices: np.ndarray, f0: np.ndarray, sdp: SdpSearch | None
) -> np.ndarray:
    basis = problem.basis
    m0 = np.einsum("p,cpkl->ckl", f0, matrices)
    mi = np.einsum("pi,cpkl->ickl", basis, matrices)
    if problem.engine == "sdp" and sdp is not None:
        found = sdp.solve(f0)
        if found is not None:
            t, z = found
            if _margin(m0, mi, z) >= -PSD_TOL or t < -PSD_TOL:
                return z
        log_step("conic solver inconclusive, falling back to multi-start search")
    _, z = multistart_search(m0, mi, seed=problem.seed)
    return z


def _feasible_state(q: float, problem: Problem) -> FeasibilityCertificate | Infeasible:
    cons = problem.cons
    assert cons.matrices is not None
    f0 = problem.particular(q)
    if problem.engine == "sdp" and problem._sdp is None:
        problem._sdp = SdpSearch(cons.matrices, problem.basis)
    z = _search(problem, cons.matrices, f0, problem._sdp)
    f = f0 + problem.basis @ z
    worst = float(np.linalg.eigvalsh(cons.evaluate(f))[:, 0].min())
    if worst < -PSD_TOL:
        return Infeasible(q, worst, "no f makes every constraint positive")
    residual = problem.system.residual(dict(zip(problem.system.unknowns, map(float, f))), q)
    return problem.certificate(q, f, worst_eigenvalue=worst, equation_residual=residual)


def _random_product(cons: ConstraintSet, rng: np.random.Generator) -> List[np.ndarray]:
    out = []
    for part in cons.parties[:-1]:
        d = 2 ** len(part)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        out.append(v / np.linalg.norm(v))
    return out


def _feasible_all(q: float, problem: Problem) -> FeasibilityCertificate | Infeasible:
    """
    Cutting planes: require Xi[|a><a|] >= 0 for a growing set of product
    states a, each new one the worst product state the seesaw finds for the
    current solution.  The cuts ask for positivity of Xi on product inputs,
    which is stronger than block positivity of its Choi operator, so both an
    infeasible relaxation and a passed screen are heuristic answers.
    """
    cons = problem.cons
    cls = problem.system.cls
    assert cons.choi is not None
    if not problem._cuts:
        rng = np.random.default_rng(problem.seed)
        problem._cuts = [
            product_state_terms(cls, cons, _random_product(cons, rng))
            for _ in range(ALL_INITIAL_CUTS)
        ]
    f0 = problem.particular(q)
    value = -np.inf
    for attempt in range(ALL_MAX_ROUNDS):
        matrices = np.array(problem._cuts)
        sdp = SdpSearch(matrices, problem.basis) if problem.engine == "sdp" else None
        z = _search(problem, matrices, f0, sdp)
        f = f0 + problem.basis @ z
        relaxed = float(np.linalg.eigvalsh(np.einsum("p,cpkl->ckl", f, matrices))[:, 0].min())
        if relaxed < -PSD_TOL:
            reason = f"sampled product states already infeasible (round {attempt})"
            return Infeasible(q, relaxed, reason)
        omega = np.einsum("p,pab->ab", f, cons.choi)
        screen = block_positivity_heuristic(
            omega, cons.parties, restarts=ALL_SCREEN_RESTARTS, seed=problem.seed + attempt
        )
        value = screen.value
        if value >= -PSD_TOL:
            residual = problem.system.residual(dict(zip(problem.system.unknowns, map(float, f))), q)
            return problem.certificate(
                q, f, block_positivity=value, equation_residual=residual
            )
        problem._cuts.append(product_state_terms(cls, cons, screen.vectors[:-1]))
    return Infeasible(q, value, "cutting planes did not converge")


def feasible(q: float, problem: Problem) -> FeasibilityCertificate | Infeasible:
    if problem.cons.mode == "all":
        return _feasible_all(q, problem)
    return _feasible_state(q, problem)


@dataclass
class ThresholdResult:
    cls: DissociationClass
    state: str
    noise: Noise
    q_star: float
    certificate: FeasibilityCertificate | None
    report: VerificationReport | None
    seconds: float
    probes: List[Tuple[float, bool]] = field(default_factory=list)

    @property
    def gave_up(self) -> bool:
        "no certificate at any probed q above 0"
        return self.certificate is None or self.q_star <= 0

    @property
    def heuristic(self) -> bool:
        return self.state == ALL

    @property
    def status(self) -> str:
        if self.gave_up:
            return "gave-up"
        if self.report is None or not self.report.ok:
            return "unverified"
        return "heuristic" if self.heuristic else "verified"

    def as_row(self) -> Dict[str, Any]:
        return {
            "state": self.state,
            "n": self.cls.n,
            "noise": self.noise.value,
            "class": self.cls.name,
            "q_star": round(self.q_star, 6),
            "verified": bool(self.report is not None and self.report.ok),
            "heuristic": self.heuristic,
            "status": self.status,
        }


def prepare(
    cls: DissociationClass,
    state: "NamedState | str",
    noise: Noise,
    *,
    engine: Engine = "sdp",
    seed: int = 0,
    dedup: bool = True,
    workers: int = 1,
) -> Problem:
    system = build_system(cls, noise)
    if isinstance(state, str):
        if state != ALL:
            raise ValueError(f"unknown input marker {state!r}")
        if cls.n > ALL_MAX_QUBITS:
            raise UserError(
                f"Error: the all-states mode supports up to {ALL_MAX_QUBITS} qubits, got {cls.n}"
            )
        cons = constraint_set(cls, system.unknowns, ALL)
        label = ALL
    else:
        cons = constraint_set(cls, system.unknowns, state.rho, dedup=dedup, workers=workers)
        label = state.spec
    return Problem(system, cons, label, engine, seed)


def max_threshold(
    cls: DissociationClass,
    state: "NamedState | str",
    noise: Noise,
    *,
    resolution: float = 1e-3,
    engine: Engine = "sdp",
    seed: int = 0,
    dedup: bool = True,
    workers: int = 1,
    restarts: int = DEFAULT_RESTARTS,
) -> ThresholdResult:
    """
    Bisection over q in [0, 1].  A probe counts as feasible only when its
    certificate passes `verify_certificate`.
    """
    started = time.monotonic()
    problem = prepare(cls, state, noise, engine=engine, seed=seed, dedup=dedup, workers=workers)
    rho = None if isinstance(state, str) else state.rho
    probes: List[Tuple[float, bool]] = []

    def attempt(q: float) -> Tuple[FeasibilityCertificate, VerificationReport] | None:
        found = feasible(q, problem)
        accepted = None
        if isinstance(found, FeasibilityCertificate):
            report = verify_certificate(found, rho, restarts=restarts, seed=seed)
            if report.ok:
                accepted = (found, report)
        probes.append((q, accepted is not None))
        log_step(
            f"bisect {cls.name} n={cls.n} {problem.state} {noise.value} q={q:.6f} "
            + ("feasible" if accepted else "infeasible")
        )
        return accepted

    best = attempt(0.0)
    lo, hi = 0.0, 1.0
    top = attempt(1.0)
    if top is not None:
        best, lo = top, 1.0
    else:
        while hi - lo > resolution:
            mid = (lo + hi) / 2
            found = attempt(mid)
            if found is None:
                hi = mid
            else:
                best, lo = found, mid
    seconds = time.monotonic() - started
    cert, report = best if best is not None else (None, None)
    if cert is not None:
        cert.solver["seconds"] = round(seconds, 3)
        cert.residuals.update(report.as_dict() if report is not None else {})
    return ThresholdResult(cls, problem.state, noise, lo, cert, report, seconds, probes)
