"""System norms computed from truncated impulse-response coefficients.

Given g(0..M), the H1 and H2 norms are the l1 and l2 norms of the coefficient
sequence.  The Hinf norm is the induced-2 norm (largest singular value) of the
lower-triangular Toeplitz convolution matrix built from g, obtained by power
iteration on the associated Gram operator without materializing the matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_POWER_REL_TOL = 1e-12
_POWER_MAX_ITER = 10_000


class PowerIterationError(RuntimeError):
    """Power iteration hit its iteration cap before converging."""

    def __init__(self, estimate: float, residual: float, iterations: int):
        super().__init__(
            f"power iteration did not converge in {iterations} iterations "
            f"(last estimate {estimate:.6e}, relative residual {residual:.3e})"
        )
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


def _as_signal(x, name="sequence"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def signal_norm(x, p) -> float:
    """lp norm of a finite signal; p is 1, 2, or infinity."""
    x = _as_signal(x, "signal")
    if p == 1:
        return float(np.sum(np.abs(x)))
    if p == 2:
        return float(np.sqrt(np.sum(x * x)))
    if p == np.inf or p == float("inf"):
        return float(np.max(np.abs(x)))
    raise ValueError("p must be 1, 2, or infinity")


def h1_from_ir(g) -> float:
    """Sum of |g(k)|: the peak-to-peak induced gain of the truncated system."""
    return signal_norm(g, 1)


def h2_from_ir(g) -> float:
    """Energy of the truncated impulse response, identical to its l2 norm."""
    return signal_norm(g, 2)


@dataclass(frozen=True)
class ToeplitzSection:
    """Lower-triangular Toeplitz convolution matrix, held as its first column.

    Entry (i, j) is g(i-j) for i >= j and 0 above the diagonal.  The matrix is
    never materialized; products are truncated convolutions/correlations.
    """

    first_column: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "first_column", _as_signal(self.first_column, "first_column"))

    @property
    def size(self) -> int:
        return self.first_column.size


def toeplitz_matvec(section: ToeplitzSection, u) -> np.ndarray:
    """Product G_M u: the convolution of g and u truncated to M+1 samples."""
    u = np.asarray(u, dtype=float)
    if u.shape != section.first_column.shape:
        raise ValueError(f"expected input of length {section.size}, got {u.size}")
    return np.convolve(section.first_column, u)[: section.size]


def toeplitz_rmatvec(section: ToeplitzSection, u) -> np.ndarray:
    """Transposed product G_M' u, the correlation form of the truncated convolution."""
    u = np.asarray(u, dtype=float)
    if u.shape != section.first_column.shape:
        raise ValueError(f"expected input of length {section.size}, got {u.size}")
    return np.convolve(section.first_column, u[::-1])[: section.size][::-1]


_POWER_RES_TOL = 1e-10
_POWER_BLOCK = 2


def _start_block(g_unit: np.ndarray, width: int) -> np.ndarray:
    """Deterministic orthonormal start block: normalized g, the uniform
    direction (never annihilated by a nonzero section), then unit vectors."""
    m = g_unit.size
    candidates = [g_unit, np.full(m, 1.0 / np.sqrt(m))]
    candidates.extend(np.eye(m)[:, k] for k in range(m))
    cols = []
    for cand in candidates:
        vec = cand.copy()
        for q in cols:
            vec -= (q @ vec) * q
        norm = float(np.sqrt(np.sum(vec * vec)))
        if norm > 1e-8:
            cols.append(vec / norm)
        if len(cols) == width:
            break
    return np.column_stack(cols)


def hinf_from_ir(
    g,
    *,
    rel_tol: float = _POWER_REL_TOL,
    res_tol: float = _POWER_RES_TOL,
    max_iter: int = _POWER_MAX_ITER,
) -> float:
    """Largest singular value of the Toeplitz section built from g.

    Block power iteration on the Gram map u -> G'(G u), using only the
    convolution/correlation products.  A width-2 block is used because
    sections of systems whose gain peaks at an interior frequency carry their
    top singular values as nearly degenerate cosine/sine pairs; Rayleigh-Ritz
    inside the block resolves the pair, restoring geometric convergence.
    Iteration stops once the top Ritz pair has relative residual below
    ``res_tol`` or the Ritz value moves less than ``rel_tol`` in one step.
    """
    g = _as_signal(g, "impulse response")
    scale = float(np.sqrt(np.sum(g * g)))
    if scale == 0.0:
        return 0.0
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    # iterate on the normalized coefficients; the norm is absolutely
    # homogeneous, so the scale is reapplied at the end (avoids under/overflow)
    g_unit = g / scale
    section = ToeplitzSection(g_unit)
    width = min(_POWER_BLOCK, g_unit.size)
    basis = _start_block(g_unit, width)
    theta = 0.0
    rel_res = np.inf
    theta_prev = np.inf
    for _ in range(max_iter):
        image = np.column_stack(
            [toeplitz_rmatvec(section, toeplitz_matvec(section, basis[:, j]))
             for j in range(basis.shape[1])]
        )
        projected = basis.T @ image
        projected = 0.5 * (projected + projected.T)
        evals, evecs = np.linalg.eigh(projected)
        theta = float(evals[-1])
        ritz = evecs[:, -1]
        if theta <= 0.0:
            return 0.0  # section annihilated the whole block: zero operator
        resid = image @ ritz - theta * (basis @ ritz)
        rel_res = float(np.sqrt(np.sum(resid * resid))) / theta
        if rel_res <= res_tol or abs(theta - theta_prev) <= rel_tol * theta:
            return scale * float(np.sqrt(theta))
        theta_prev = theta
        q, _ = np.linalg.qr(image)
        basis = q
    raise PowerIterationError(scale * float(np.sqrt(max(theta, 0.0))), rel_res, max_iter)


def norms_from_ir(g):
    """All three norms of the truncated system as an (h1, h2, hinf) tuple."""
    from .lti import NormTriple

    return NormTriple(h1_from_ir(g), h2_from_ir(g), hinf_from_ir(g))
