"""Local minimization of the l_p cost and the random-restart campaign.

The local solver is a damped Newton (Levenberg-Marquardt) method in the
tangent space.  Steps are confined to the horizontal space, so the
three-dimensional gauge null space never needs pinning.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import so3
from .cost import cost as lp_cost
from .cost import gradient, hessian, residuals, retract
from .errors import InvalidParam, NearZeroResidual
from .gauge import project_horizontal
from .numerics import project_to_so3

LAMBDA_MAX = 1e16


@dataclass(frozen=True)
class SolveOptions:
    p: float = 2.0
    max_iters: int = 200
    grad_tol: float = 1e-8
    step_tol: float = 1e-10
    lm_lambda_init: float = 1e-4
    lm_lambda_up: float = 10.0
    lm_lambda_down: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.p <= 1:
            raise InvalidParam("p must exceed 1 for the local solver")
        if min(self.grad_tol, self.step_tol, self.lm_lambda_init) <= 0:
            raise InvalidParam("tolerances and initial damping must be positive")
        if self.max_iters < 0:
            raise InvalidParam("max_iters must be nonnegative")


@dataclass
class SolveResult:
    solution: np.ndarray
    final_cost: float
    converged: bool
    iters: int
    final_grad_norm: float
    status: str = ""

    def record(self, run_index: int | None = None) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "solution"}
        if run_index is not None:
            d = {"run_index": run_index, **d}
        return d


def _gauge_complement(n: int) -> np.ndarray:
    V = np.kron(np.ones((1, n)), np.eye(3)) / np.sqrt(n)
    return V.T @ V


def solve_local(vg, init: np.ndarray, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """Minimize the l_p cost from ``init``.

    Each iteration solves ``(P H P + lam I) delta = -P g`` on the horizontal
    space (``P`` removes the gauge component), retracts vertex-wise, and
    adapts ``lam`` multiplicatively.  A factorization failure means the
    damped system is not positive definite and ``lam`` is raised.  Trial
    points where ``p < 2`` derivatives break down are rejected like uphill
    steps.

    Returns the best iterate.  ``converged`` is true when the horizontal
    gradient's infinity norm drops below ``grad_tol`` or an accepted step
    is shorter than ``step_tol``.
    """
    p = opts.p
    x = np.array(init, dtype=float)
    if x.shape != (vg.n, 3, 3):
        raise InvalidParam("initial solution has shape %s, expected (%d, 3, 3)" % (x.shape, vg.n))
    n = vg.n
    vert = _gauge_complement(n)
    eye = np.eye(3 * n)
    f = lp_cost(vg, x, p)
    lam = opts.lm_lambda_init
    status = "max_iters"
    converged = False
    gnorm = np.inf
    it = 0
    for it in range(opts.max_iters + 1):
        try:
            res = residuals(vg, x)
            g = project_horizontal(gradient(vg, x, p, res))
            gnorm = float(np.abs(g).max()) if g.size else 0.0
            if gnorm < opts.grad_tol:
                converged, status = True, "grad_tol"
                break
            if it == opts.max_iters:
                break
            Hh = project_horizontal(hessian(vg, x, p, res))
        except NearZeroResidual:
            status = "near_zero_residual"
            break

        accepted = False
        while lam < LAMBDA_MAX:
            try:
                cf = cho_factor(Hh + lam * eye + vert, check_finite=False)
            except LinAlgError:
                lam *= opts.lm_lambda_up
                continue
            delta = -cho_solve(cf, g, check_finite=False)
            if np.abs(delta).max() < opts.step_tol:
                break
            trial = retract(x, delta)
            f_trial = lp_cost(vg, trial, p)
            if f_trial <= f:
                x, f = trial, f_trial
                lam = max(lam * opts.lm_lambda_down, 1e-15)
                accepted = True
                break
            lam *= opts.lm_lambda_up
        if not accepted:
            if lam >= LAMBDA_MAX:
                status = "damping_overflow"
            else:
                converged, status = True, "step_tol"
            break
        # keep the iterate on SO(3) despite rounding drift
        if it % 20 == 19:
            x = project_to_so3(x)
            f = lp_cost(vg, x, p)
    return SolveResult(x, f, converged, it, gnorm, status)


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Independent stream for one campaign run, derived from ``(seed, run_index)``."""
    return np.random.default_rng([int(seed), int(run_index)])


def random_restart_campaign(vg, opts: SolveOptions = SolveOptions(), n_restarts: int = 200,
                            seed: int | None = None) -> list[SolveResult]:
    """``n_restarts`` local solves from independent Haar-uniform initial guesses."""
    if n_restarts < 1:
        raise InvalidParam("n_restarts must be at least 1")
    seed = opts.seed if seed is None else seed
    out = []
    for k in range(n_restarts):
        init = so3.random_uniform(run_rng(seed, k), vg.n)
        out.append(solve_local(vg, init, opts))
    return out


def write_campaign(results: list[SolveResult], path, sidecar=None) -> None:
    """JSON-lines record per run; solutions go to a sidecar ``.npz`` file."""
    path = Path(path)
    sidecar = Path(sidecar) if sidecar is not None else path.with_suffix(".solutions.npz")
    with path.open("w") as fh:
        for k, r in enumerate(results):
            rec = r.record(k)
            rec["solution_ref"] = "%s#%d" % (sidecar.name, k)
            fh.write(json.dumps(rec) + "\n")
    np.savez(sidecar, solutions=np.stack([r.solution for r in results]))


def read_campaign(path, sidecar=None) -> list[SolveResult]:
    path = Path(path)
    sidecar = Path(sidecar) if sidecar is not None else path.with_suffix(".solutions.npz")
    sols = np.load(sidecar)["solutions"]
    out = []
    for line in path.read_text().splitlines():
        rec = json.loads(line)
        k = rec.pop("run_index")
        rec.pop("solution_ref", None)
        out.append(SolveResult(solution=sols[k], **rec))
    return out
