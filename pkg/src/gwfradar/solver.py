"""Generalized Wirtinger Flow over real reflectivities.

Spectral initialization (power iteration on the backprojected lifted estimate)
followed by fixed-step gradient descent on ``J(rho) = 0.5 * ||F(rho rho^T) - d||^2``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .lifted import LiftedOperator

log = logging.getLogger(__name__)

INIT_SCALES = ("eigenvalue", "least_squares")


class DegenerateDataError(RuntimeError):
    """Backprojected estimate has no positive leading eigenvalue."""


class DivergenceError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    max_iterations: int = 4000
    step_size: float = 0.2
    power_iterations: int = 200
    power_tolerance: float = 1e-9
    convergence_tolerance: float = 0.0
    seed: int = 0
    divergence_factor: float = 1e3
    init_scale: str = "eigenvalue"
    # step ramps in as mu * (1 - exp(-k / warmup)); 0 disables
    warmup: float = 100.0

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.init_scale not in INIT_SCALES:
            raise ValueError(f"init_scale must be one of {INIT_SCALES}")
        if self.warmup < 0:
            raise ValueError("warmup must be non-negative")
        if self.max_iterations < 0 or self.power_iterations < 1:
            raise ValueError("iteration counts must be non-negative (power_iterations >= 1)")


@dataclass
class SolverState:
    iterate: np.ndarray
    init_norm: float
    eigenvalue: float
    history: list[float] = field(default_factory=list)
    iteration: int = 0
    power_converged: bool = True
    increases: int = 0  # iterations where the objective went up

    @property
    def monotone(self) -> bool:
        return self.increases == 0


def _as_values(d) -> np.ndarray:
    return np.asarray(getattr(d, "values", d), dtype=complex)


def power_iteration(matvec, K: int, iterations: int, tol: float, seed=0):
    """Leading (algebraically largest) eigenpair of a symmetric operator.

    Runs plain power iteration; if the dominant-magnitude eigenvalue is
    negative the spectrum is shifted by its magnitude and the iteration rerun.
    Returns ``(eigenvalue, vector, converged)``.
    """
    rng = np.random.default_rng(seed)
    start = rng.standard_normal(K)
    start /= np.linalg.norm(start)

    def run(op, v):
        lam = 0.0
        for _ in range(iterations):
            w = op(v)
            lam = float(v @ w)
            nw = np.linalg.norm(w)
            if nw == 0:
                return 0.0, v, True
            resid = np.linalg.norm(w - lam * v)
            v = w / nw
            if resid <= tol * max(abs(lam), np.finfo(float).tiny):
                return lam, v, True
        return float(v @ op(v)), v, False

    lam, v, ok = run(matvec, start)
    if lam < 0:
        shift = abs(lam)
        lam_s, v, ok = run(lambda x: matvec(x) + shift * x, start)
        lam = lam_s - shift
    return lam, v, ok


def spectral_initialize(d, operator: LiftedOperator, config: SolverConfig | None = None):
    """Return ``(lambda0, rho0)`` with ``rho0 = sqrt(lambda0) * v``."""
    config = config or SolverConfig()
    dv = _as_values(d)
    if not np.all(np.isfinite(dv)):
        raise ValueError("interferometric data must be finite")
    lam, v, ok = power_iteration(
        lambda x: operator.backprojection_matvec(dv, x),
        operator.K,
        config.power_iterations,
        config.power_tolerance,
        config.seed,
    )
    if not ok:
        warnings.warn(f"power iteration did not converge in {config.power_iterations} steps", RuntimeWarning)
    if lam <= 0:
        raise DegenerateDataError(f"leading eigenvalue of backprojection is {lam:.3e} (must be > 0)")
    if config.init_scale == "least_squares":
        # alpha^2 = argmin_t ||t F(v v^T) - d||^2 over t > 0
        fv = operator.forward_rank1(v).values
        t = float(np.vdot(fv, dv).real) / float(np.vdot(fv, fv).real)
        if t <= 0:
            raise DegenerateDataError("least-squares initial scale is non-positive")
        return lam, np.sqrt(t) * v, ok
    return lam, np.sqrt(lam) * v, ok


def objective(rho, d, operator: LiftedOperator) -> float:
    e = operator.forward_rank1(rho).values - _as_values(d)
    return 0.5 * float(np.vdot(e, e).real)


def gradient(rho, d, operator: LiftedOperator) -> np.ndarray:
    """Exact real gradient of the objective: ``2 P_S(Re F^H(e)) rho``."""
    rho = np.asarray(rho, dtype=float)
    z = operator.linear_terms(rho)
    e = operator.correlate_terms(z) - _as_values(d)
    return 2.0 * operator.adjoint_apply(e, rho, z)


def _objective_and_gradient(rho, dv, operator):
    z = operator.linear_terms(rho)
    e = operator.correlate_terms(z) - dv
    return 0.5 * float(np.vdot(e, e).real), 2.0 * operator.adjoint_apply(e, rho, z)


def solve(d, operator: LiftedOperator, config: SolverConfig | None = None, init=None, callback=None):
    """Run GWF.  Returns ``(rho_hat, state)``; ``state.history[k]`` is J at iterate k.

    ``init`` overrides the spectral initializer (the step normalization then
    uses ``||init||^2``).  ``callback(k, rho, J)`` is called once per recorded
    iterate.
    """
    config = config or SolverConfig()
    dv = _as_values(d)
    if init is None:
        lam, rho, ok = spectral_initialize(dv, operator, config)
    else:
        rho = np.array(init, dtype=float)
        lam, ok = float(rho @ rho), True
    init_norm = float(rho @ rho)
    if init_norm == 0:
        raise DegenerateDataError("initial iterate is zero")
    state = SolverState(iterate=rho, init_norm=init_norm, eigenvalue=lam, power_converged=ok)
    step = config.step_size / init_norm
    data_energy = 0.5 * float(np.vdot(dv, dv).real)

    J, g = _objective_and_gradient(rho, dv, operator)
    J0 = J
    state.history.append(J)
    if callback:
        callback(0, rho, J)
    for k in range(1, config.max_iterations + 1):
        mu_k = step if config.warmup <= 0 else step * -np.expm1(-k / config.warmup)
        rho = rho - mu_k * g
        J, g = _objective_and_gradient(rho, dv, operator)
        if J > state.history[-1]:
            state.increases += 1
        state.history.append(J)
        state.iteration = k
        if callback:
            callback(k, rho, J)
        if not np.isfinite(J) or J > config.divergence_factor * max(J0, np.finfo(float).tiny):
            state.iterate = rho
            raise DivergenceError(
                f"objective grew from {J0:.3e} to {J:.3e} at iteration {k}; reduce step_size (now {config.step_size})"
            )
        if config.convergence_tolerance > 0 and data_energy > 0 and J / data_energy < config.convergence_tolerance:
            break
    state.iterate = rho
    if state.increases:
        log.warning("objective increased on %d of %d iterations; step_size %.3g may be too large",
                    state.increases, state.iteration, config.step_size)
    return rho, state


def aligned_mse(rho_hat, rho_true) -> float:
    """Per-pixel MSE after removing the global sign ambiguity."""
    rho_hat = np.asarray(rho_hat, dtype=float)
    rho_true = np.asarray(rho_true, dtype=float)
    if rho_hat.shape != rho_true.shape:
        raise ValueError("shape mismatch")
    s = -1.0 if float(rho_true @ rho_hat) < 0 else 1.0
    return float(np.mean((rho_true - s * rho_hat) ** 2))


def relative_mse(rho_hat, rho_true) -> float:
    """Aligned MSE divided by the mean square of the truth."""
    return aligned_mse(rho_hat, rho_true) / float(np.mean(np.asarray(rho_true, dtype=float) ** 2))
