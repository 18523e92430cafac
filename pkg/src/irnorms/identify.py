"""Impulse-response identification by regularized least squares.

The estimator solves

    theta_hat = argmin ||y - Phi theta||^2 + sigma2 * theta' P^{-1} theta

where P is the tuned/correlated (TC) prior covariance P(i,j) = c * alpha^max(i,j)
encoding exponential decay of the impulse response.  Hyperparameters (c, alpha)
are chosen by minimizing the negative log marginal likelihood of y under the
Gaussian model y ~ N(0, Phi P Phi' + sigma2 I); all linear algebra runs on
(M+1) x (M+1) factors, never on N x N matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky, eigh, toeplitz, LinAlgError

from .loop import Dataset

# plain least squares refuses problems beyond this condition estimate
_COND_LIMIT = 1e12

# empirical-Bayes search grids
_ALPHA_GRID = np.round(np.arange(0.70, 0.992, 0.01), 2)
_C_GRID = np.logspace(-2.0, 2.0, 20)
_REFINE_HALVINGS = 5
_ALPHA_BOUNDS = (1e-4, 1.0 - 1e-4)


class RankDeficiencyError(RuntimeError):
    """Regression matrix is numerically rank deficient."""

    def __init__(self, cond: float):
        super().__init__(
            f"regression matrix condition estimate {cond:.3e} exceeds {_COND_LIMIT:.1e}"
        )
        self.cond = cond


class FactorizationError(RuntimeError):
    """A symmetric factorization lost positive definiteness."""


@dataclass(frozen=True)
class TCKernelParams:
    """TC-kernel hyperparameters: scale c > 0, decay 0 < alpha < 1, noise sigma2 > 0."""

    c: float
    alpha: float
    sigma2: float

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ValueError("c must be a positive finite real")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if not (self.sigma2 > 0 and np.isfinite(self.sigma2)):
            raise ValueError("sigma2 must be a positive finite real")


@dataclass(frozen=True)
class RegressionProblem:
    """Convolution regression y ~ Phi theta with Phi(i,j) = r(i-j) for i >= j."""

    phi: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if phi.ndim != 2 or y.ndim != 1 or phi.shape[0] != y.size:
            raise ValueError("phi must be N x (M+1) with y of length N")
        if phi.shape[0] < phi.shape[1]:
            raise ValueError("regression needs at least as many rows as columns")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self) -> int:
        return self.phi.shape[0]

    @property
    def order(self) -> int:
        return self.phi.shape[1] - 1


def build_regression(data: Dataset, order: int) -> RegressionProblem:
    """Regression problem for the first ``order + 1`` impulse-response taps.

    Column j of Phi is the excitation delayed by j samples (zero pre-padding);
    the j = 0 column carries the direct feedthrough, which is nonzero for any
    biproper target such as a sensitivity function.
    """
    n = len(data)
    if order < 1:
        raise ValueError("order must be at least 1")
    if n <= order:
        raise ValueError(f"need more samples than coefficients: N={n}, M={order}")
    first_row = np.zeros(order + 1)
    first_row[0] = data.r[0]
    phi = toeplitz(data.r, first_row)
    return RegressionProblem(phi=phi, y=data.v.copy())


def ls_estimate(problem: RegressionProblem) -> np.ndarray:
    """Plain least-squares impulse-response estimate."""
    cond = float(np.linalg.cond(problem.phi))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise RankDeficiencyError(cond)
    theta, *_ = np.linalg.lstsq(problem.phi, problem.y, rcond=None)
    return theta


def tc_kernel(order: int, c: float, alpha: float) -> np.ndarray:
    """TC prior covariance P(i,j) = c * alpha^max(i,j), shape (order+1)^2."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if not c > 0:
        raise ValueError("c must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    idx = np.arange(order + 1)
    return c * alpha ** np.maximum.outer(idx, idx)


def _kernel_cholesky(order: int, c: float, alpha: float) -> np.ndarray:
    try:
        return cholesky(tc_kernel(order, c, alpha), lower=True)
    except LinAlgError as exc:
        raise FactorizationError(
            f"TC kernel lost positive definiteness (order={order}, c={c}, alpha={alpha})"
        ) from exc


def regularized_estimate(problem: RegressionProblem, params: TCKernelParams) -> np.ndarray:
    """Solve (Phi'Phi + sigma2 P^{-1}) theta = Phi'y through the factored prior.

    With P = L L', substituting theta = L eta turns the normal equations into
    (L'Phi'Phi L + sigma2 I) eta = L'Phi'y, which is solved by a Cholesky
    factorization; P^{-1} is never formed.
    """
    L = _kernel_cholesky(problem.order, params.c, params.alpha)
    B = problem.phi @ L
    A = B.T @ B
    A[np.diag_indices_from(A)] += params.sigma2
    rhs = L.T @ (problem.phi.T @ problem.y)
    try:
        eta = cho_solve(cho_factor(A, lower=True), rhs)
    except LinAlgError as exc:
        raise FactorizationError("regularized normal equations lost positive definiteness") from exc
    return L @ eta


def estimate_noise_variance(problem: RegressionProblem) -> float:
    """Residual variance of the plain least-squares fit, ||y - Phi theta||^2 / (N-M-1)."""
    dof = problem.n_samples - problem.order - 1
    if dof <= 0:
        raise ValueError("noise variance needs N > M + 1 (positive degrees of freedom)")
    theta = ls_estimate(problem)
    resid = problem.y - problem.phi @ theta
    return float(resid @ resid) / dof


class _MarginalLikelihood:
    """Negative log marginal likelihood of y under y ~ N(0, Phi P Phi' + sigma2 I).

    For fixed alpha the kernel is c * P1(alpha), so a single eigendecomposition
    of L1' Phi'Phi L1 (with P1 = L1 L1') serves every c: each evaluation after
    that is O(M).  Determinant and quadratic form use the low-rank identities

        log det(Sigma) = (N-M-1) log sigma2 + sum log(c lam_i + sigma2)
        y' Sigma^{-1} y = (y'y - c * sum w_i^2 / (c lam_i + sigma2)) / sigma2.
    """

    def __init__(self, problem: RegressionProblem, sigma2: float):
        self.order = problem.order
        self.n = problem.n_samples
        self.sigma2 = sigma2
        self.yty = float(problem.y @ problem.y)
        self._ptp = problem.phi.T @ problem.phi
        self._pty = problem.phi.T @ problem.y
        self._per_alpha: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def _alpha_factors(self, alpha: float):
        cached = self._per_alpha.get(alpha)
        if cached is None:
            L1 = _kernel_cholesky(self.order, 1.0, alpha)
            lam, Q = eigh(L1.T @ self._ptp @ L1)
            lam = np.maximum(lam, 0.0)  # Gram spectrum; clip eigh round-off
            w = Q.T @ (L1.T @ self._pty)
            cached = (lam, w)
            self._per_alpha[alpha] = cached
        return cached

    def __call__(self, c: float, alpha: float) -> float:
        lam, w = self._alpha_factors(alpha)
        d = c * lam + self.sigma2
        logdet = (self.n - self.order - 1) * math.log(self.sigma2) + float(np.sum(np.log(d)))
        quad = (self.yty - c * float(np.sum(w * w / d))) / self.sigma2
        return 0.5 * (self.n * math.log(2.0 * math.pi) + logdet + quad)


def marginal_nll(problem: RegressionProblem, params: TCKernelParams) -> float:
    """Negative log marginal likelihood of the data at the given hyperparameters."""
    return _MarginalLikelihood(problem, params.sigma2)(params.c, params.alpha)


def tune_hyperparameters(problem: RegressionProblem) -> TCKernelParams:
    """Empirical-Bayes choice of (c, alpha) with sigma2 fixed from LS residuals.

    A coarse grid scan (alpha-major, ascending; first minimum wins on ties) is
    followed by one pass of coordinate refinement that halves the step sizes
    five times.  The search is derivative free and fully deterministic.
    """
    sigma2 = estimate_noise_variance(problem)
    cost = _MarginalLikelihood(problem, sigma2)

    best = math.inf
    best_c = best_alpha = None
    for alpha in _ALPHA_GRID:
        for c in _C_GRID:
            val = cost(c, alpha)
            if math.isfinite(val) and val < best:
                best, best_c, best_alpha = val, float(c), float(alpha)
    if best_c is None:
        raise RuntimeError("marginal likelihood was non-finite over the entire grid")

    alpha_step = float(_ALPHA_GRID[1] - _ALPHA_GRID[0])
    logc_step = math.log10(_C_GRID[1]) - math.log10(_C_GRID[0])
    for _ in range(_REFINE_HALVINGS):
        alpha_step *= 0.5
        logc_step *= 0.5
        for cand in (best_alpha - alpha_step, best_alpha + alpha_step):
            cand = min(max(cand, _ALPHA_BOUNDS[0]), _ALPHA_BOUNDS[1])
            val = cost(best_c, cand)
            if math.isfinite(val) and val < best:
                best, best_alpha = val, cand
        for cand in (best_c * 10.0 ** (-logc_step), best_c * 10.0 ** logc_step):
            val = cost(cand, best_alpha)
            if math.isfinite(val) and val < best:
                best, best_c = val, cand
    return TCKernelParams(c=best_c, alpha=best_alpha, sigma2=sigma2)
