"""Discrete-time SISO transfer functions: algebra, simulation, reference norms.

Coefficient convention throughout: descending powers of z, so ``num=[1.0, -0.5]``
means ``z - 0.5``.  Only proper rational functions (numerator degree no larger
than denominator degree) are representable.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

# Poles with modulus >= 1 - STABILITY_MARGIN are treated as unstable: the
# norms computed here diverge as poles approach the unit circle.
STABILITY_MARGIN = 1e-9


class RootFindingError(RuntimeError):
    """Root iteration did not reach the residual tolerance within its cap."""


class TailBoundError(RuntimeError):
    """Impulse-response tail mass could not be certified below the budget."""


class NormTriple(NamedTuple):
    """H1 (peak-to-peak gain), H2 (impulse energy), Hinf (peak frequency gain)."""

    h1: float
    h2: float
    hinf: float


def _as_coeffs(values, name):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d coefficient sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} coefficients must all be finite")
    return arr


class TransferFunction:
    """Proper rational function of the discrete shift operator z.

    Parameters
    ----------
    num, den:
        Real coefficient sequences in descending powers of z.  The leading
        denominator coefficient must be nonzero and the numerator degree must
        not exceed the denominator degree.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        num = _as_coeffs(num, "num")
        den = _as_coeffs(den, "den")
        if den[0] == 0.0:
            raise ValueError("leading denominator coefficient must be nonzero")
        # normalize the numerator representation: drop leading zeros
        nz = np.nonzero(num)[0]
        num = num[nz[0]:] if nz.size else np.zeros(1)
        if num.size > den.size:
            raise ValueError(
                "improper transfer function: numerator degree "
                f"{num.size - 1} exceeds denominator degree {den.size - 1}"
            )
        self.num = num
        self.den = den

    @classmethod
    def from_strings(cls, num_text: str, den_text: str) -> "TransferFunction":
        """Build from comma-separated coefficient lists, e.g. ``"1,-0.9"``."""
        return cls(_parse_coeff_list(num_text, "num"), _parse_coeff_list(den_text, "den"))

    @property
    def degree(self) -> int:
        return self.den.size - 1

    @property
    def is_biproper(self) -> bool:
        return self.num.size == self.den.size

    def __repr__(self):
        return f"TransferFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def _parse_coeff_list(text: str, name: str) -> np.ndarray:
    parts = [p.strip() for p in text.split(",")]
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ValueError(f"cannot parse {name} coefficient list {text!r}: {exc}") from None


def simulate(tf: TransferFunction, u) -> np.ndarray:
    """Response of ``tf`` to the input sequence ``u`` from zero initial conditions."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ValueError("input must be a 1-d sequence")
    if u.size == 0:
        return np.zeros(0)
    b = np.concatenate([np.zeros(tf.den.size - tf.num.size), tf.num])
    return lfilter(b, tf.den, u)


def impulse_response(tf: TransferFunction, order: int) -> np.ndarray:
    """First ``order + 1`` impulse-response coefficients g(0..order)."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    pulse = np.zeros(order + 1)
    pulse[0] = 1.0
    return simulate(tf, pulse)


def freq_response(tf: TransferFunction, omega: float) -> complex:
    """Value of ``tf`` at z = exp(i*omega); complex infinity on a unit-circle pole."""
    z = np.exp(1j * float(omega))
    den_val = np.polyval(tf.den, z)
    if den_val == 0:
        return complex(np.inf, 0.0)
    return complex(np.polyval(tf.num, z) / den_val)


def _freq_magnitudes(tf: TransferFunction, omegas: np.ndarray) -> np.ndarray:
    z = np.exp(1j * omegas)
    with np.errstate(divide="ignore", invalid="ignore"):
        mags = np.abs(np.polyval(tf.num, z) / np.polyval(tf.den, z))
    return mags


def closed_loop(G: TransferFunction, C: TransferFunction):
    """Sensitivity S = 1/(1+CG) and complementary sensitivity T = CG/(1+CG).

    Both are returned over the common denominator ``den(C)den(G) + num(C)num(G)``;
    no pole-zero cancellation is attempted, so S + T = 1 holds exactly as a
    rational identity.
    """
    open_num = np.polymul(C.num, G.num)
    open_den = np.polymul(C.den, G.den)
    den = np.polyadd(open_den, open_num)
    if not np.any(den) or den[0] == 0.0:
        raise ValueError("degenerate closed loop: zero leading closed-loop denominator")
    S = TransferFunction(open_den, den)
    T = TransferFunction(open_num, den)
    return S, T


def polynomial_roots(coeffs, *, residual_tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """All complex roots of a polynomial via Durand-Kerner iteration.

    Convergence is declared when every candidate root has monic-polynomial
    residual below ``residual_tol``; otherwise :class:`RootFindingError`.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    c = c[nz[0]:]
    n = c.size - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    monic = c / c[0]
    # non-real, non-unit-modulus seed points avoid symmetric stalls
    roots = (0.4 + 0.9j) ** np.arange(1, n + 1)
    for _ in range(max_iter):
        vals = np.polyval(monic, roots)
        if np.max(np.abs(vals)) < residual_tol:
            return roots
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        denom[denom == 0] = 1e-30
        roots = roots - vals / denom
    vals = np.polyval(monic, roots)
    worst = float(np.max(np.abs(vals)))
    if worst < residual_tol:
        return roots
    raise RootFindingError(
        f"Durand-Kerner did not converge in {max_iter} iterations "
        f"(worst residual {worst:.3e}, tolerance {residual_tol:.1e})"
    )


def is_stable(tf: TransferFunction) -> bool:
    """True iff every pole has modulus < 1 - STABILITY_MARGIN."""
    if tf.degree == 0:
        return True
    roots = polynomial_roots(tf.den)
    return bool(np.all(np.abs(roots) < 1.0 - STABILITY_MARGIN))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Maximum value of a unimodal f on [lo, hi] located to width ``tol``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(fc, fd)


_TAIL_WINDOW = 50
_TAIL_SAMPLE_TOL = 1e-12
_TAIL_MASS_TOL = 1e-10
_TAIL_MAX_LEN = 200_000
_HINF_GRID = 4096
_HINF_OMEGA_TOL = 1e-10


def _certified_impulse_response(tf: TransferFunction) -> np.ndarray:
    """Impulse response long enough that the discarded l1 tail is < 1e-10.

    The tail is certified with a geometric envelope fitted to the final
    window of samples; failure to certify by the cap length is an error.
    """
    n = 1024
    while True:
        g = impulse_response(tf, n)
        window = np.abs(g[-_TAIL_WINDOW:])
        if window.max() < _TAIL_SAMPLE_TOL:
            half = _TAIL_WINDOW // 2
            a1 = window[:half].max()
            a2 = window[half:].max()
            if a2 == 0.0:
                return g
            if a1 > a2:
                rho = (a2 / a1) ** (1.0 / half)
                if a2 * rho / (1.0 - rho) < _TAIL_MASS_TOL:
                    return g
        if n >= _TAIL_MAX_LEN:
            raise TailBoundError(
                f"could not certify impulse-response tail below {_TAIL_MASS_TOL:.1e} "
                f"within {_TAIL_MAX_LEN} samples"
            )
        n = min(2 * n, _TAIL_MAX_LEN)


def true_norms(tf: TransferFunction) -> NormTriple:
    """Reference H1/H2/Hinf values computed directly from the model.

    H1 and H2 come from a long impulse response truncated once a geometric
    envelope certifies the remaining l1 mass below 1e-10; Hinf is the peak of
    |tf(e^{i omega})| over a dense grid refined by golden-section search.
    """
    if not is_stable(tf):
        raise ValueError("true_norms requires a stable transfer function")
    g = _certified_impulse_response(tf)
    h1 = float(np.sum(np.abs(g)))
    h2 = float(np.sqrt(np.sum(g * g)))

    omegas = np.linspace(0.0, np.pi, _HINF_GRID)
    mags = _freq_magnitudes(tf, omegas)
    peak = int(np.argmax(mags))
    lo = omegas[max(peak - 1, 0)]
    hi = omegas[min(peak + 1, _HINF_GRID - 1)]
    refined = _golden_max(lambda w: abs(freq_response(tf, w)), lo, hi, _HINF_OMEGA_TOL)
    hinf = float(max(refined, mags[peak]))
    return NormTriple(h1, h2, hinf)
