"""l1 reconstruction from subsampled Walsh measurements.

solve_bpdn minimizes ||xi||_1 subject to ||A xi - g||_2 <= delta for the
matrix-free sampled operator A = P_Omega U P_L, with a first-order
primal-dual splitting: the l1 term enters through soft thresholding and
the constraint through Euclidean projection onto the delta-ball around g,
both in closed form.  Step sizes come from a power-iteration estimate of
||A|| with a 0.95 safety factor.  The truncated Walsh series baseline and
the error metric live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operator import MeasurementVector
from .walsh import fwht_sequency, ifwht_sequency


class NumericalError(RuntimeError):
    """Raised when an iteration produces non-finite values."""


@dataclass
class ReconstructionConfig:
    """Solver parameters; defaults follow the reference experiments
    (L = 2^12 coefficients, effectively noiseless delta)."""

    L: int = 1 << 12
    delta: float = 1e-8
    max_iter: int = 5000
    tol: float = 1e-6
    step_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.L < 1 or self.L & (self.L - 1):
            raise ValueError("truncation dimension L must be a power of two")
        if self.delta < 0 or self.tol <= 0 or self.max_iter < 1 or self.step_ratio <= 0:
            raise ValueError("invalid solver configuration")


@dataclass
class ReconstructionResult:
    coeffs: np.ndarray
    iterations: int
    objective: float
    feasibility_gap: float
    converged: bool
    rel_error: float | None = None
    objective_trace: np.ndarray = field(default=None, repr=False)


def _soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _operator_norm(matvec, rmatvec, n, seed, iters=60, tol=1e-8):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = rmatvec(matvec(v))
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(nrm - lam) <= tol * max(nrm, 1.0):
            lam = nrm
            break
        lam = nrm
    return math.sqrt(lam)


def solve_bpdn(op, omega, g, cfg=None):
    """Minimize ||xi||_1 subject to ||P_Omega U P_L xi - g||_2 <= delta.

    omega may be a SamplingScheme or an index array; g a MeasurementVector
    (its delta is used unless the config overrides it) or a plain vector.
    Non-convergence within max_iter is flagged on the result, never silent.
    """
    cfg = cfg or ReconstructionConfig()
    if hasattr(omega, "union"):
        omega = omega.union
    omega = np.asarray(omega, dtype=np.int64)
    if isinstance(g, MeasurementVector):
        delta = g.delta if g.delta > 0 else cfg.delta
        g = g.values
    else:
        delta = cfg.delta
    g = np.asarray(g, dtype=float)
    if g.shape != omega.shape:
        raise ValueError("measurement vector and omega must have equal lengths")
    L = min(cfg.L, op.levels.M_r)

    def matvec(x):
        return op.apply(x, omega)

    def rmatvec(y):
        return op.apply_adjoint(y, omega, L=L)

    norm_est = _operator_norm(matvec, rmatvec, L, cfg.seed)
    if norm_est == 0.0:
        return ReconstructionResult(
            coeffs=np.zeros(L),
            iterations=0,
            objective=0.0,
            feasibility_gap=float(np.linalg.norm(g) - delta),
            converged=True,
            objective_trace=np.zeros(1),
        )
    step = 0.95 / norm_est
    tau = step * cfg.step_ratio
    sigma = step / cfg.step_ratio

    x = np.zeros(L)
    x_bar = x.copy()
    y = np.zeros(omega.size)
    g_norm = max(np.linalg.norm(g), 1.0)
    best_obj = math.inf
    trace = []
    obj_prev = math.inf
    converged = False
    iterations = cfg.max_iter
    check_every = 10
    for it in range(1, cfg.max_iter + 1):
        # dual: prox of the conjugate of the delta-ball indicator
        w = y + sigma * matvec(x_bar) - sigma * g
        wn = np.linalg.norm(w)
        y = w * max(0.0, 1.0 - sigma * delta / wn) if wn > 0 else w
        # primal: soft thresholding
        x_new = _soft_threshold(x - tau * rmatvec(y), tau)
        x_bar = 2.0 * x_new - x
        x = x_new
        if not np.isfinite(x).all():
            raise NumericalError(f"solver produced non-finite iterates at step {it}")
        if it % check_every == 0 or it == cfg.max_iter:
            resid = np.linalg.norm(matvec(x) - g)
            feas = max(0.0, resid - delta) / g_norm
            obj = float(np.abs(x).sum())
            if feas <= cfg.tol:
                best_obj = min(best_obj, obj)
            trace.append(best_obj if best_obj < math.inf else math.nan)
            rel_change = abs(obj - obj_prev) / max(obj, 1.0)
            obj_prev = obj
            if feas <= cfg.tol and rel_change <= cfg.tol:
                converged = True
                iterations = it
                break
    resid = float(np.linalg.norm(matvec(x) - g))
    return ReconstructionResult(
        coeffs=x,
        iterations=iterations,
        objective=float(np.abs(x).sum()),
        feasibility_gap=resid - delta,
        converged=converged,
        objective_trace=np.array(trace) if trace else np.array([float(np.abs(x).sum())]),
    )


def truncated_walsh(samples_first_n, Q):
    """Inverse sequency transform of the zero-padded first-N sample vector."""
    samples = np.asarray(samples_first_n, dtype=float)
    if samples.size > (1 << Q):
        raise ValueError("more samples than grid cells")
    padded = np.zeros(1 << Q)
    padded[: samples.size] = samples
    return ifwht_sequency(padded)


def relative_l2_error(estimate, reference):
    """||estimate - reference||_2 / ||reference||_2 on equal-length grids."""
    estimate = np.asarray(estimate, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if estimate.shape != reference.shape:
        raise ValueError("grids must have equal length")
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0.0:
        raise ValueError("reference signal is zero; relative error undefined")
    return float(np.linalg.norm(estimate - reference) / ref_norm)


def measure_signal(f_grid, omega, delta=0.0, seed=None):
    """Walsh samples of a cell-average signal at the indices omega, with
    optional additive noise of exact l2 norm delta in a seeded direction."""
    f_grid = np.asarray(f_grid, dtype=float)
    if hasattr(omega, "union"):
        omega = omega.union
    omega = np.asarray(omega, dtype=np.int64)
    coeffs = fwht_sequency(f_grid)
    if omega.size and omega.max() >= coeffs.size:
        raise ValueError("omega index beyond the sample grid")
    values = coeffs[omega]
    if delta > 0:
        rng = np.random.default_rng(seed)
        z = rng.standard_normal(omega.size)
        values = values + z * (delta / np.linalg.norm(z))
    return MeasurementVector(indices=omega, values=values, delta=delta)
