"""Seedable excitation and noise generators.

Both generators are fully deterministic given a 64-bit seed: the PRBS is a
pure-integer LFSR, and Gaussian noise uses the counter-based Philox generator
with ziggurat sampling (numpy ``Generator.standard_normal``), so identical
seeds give bitwise-identical streams on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Primitive feedback taps (polynomial exponents) for maximal-length Fibonacci
# LFSRs; each yields period 2**r - 1, verified exhaustively by the test suite.
_PRIMITIVE_TAPS = {
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
}

DEFAULT_REGISTER_LENGTH = 11  # period 2047, comfortably above the N=2000 default

_SEED_BOUND = 2**64


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise TypeError("seed must be an integer")
    if not 0 <= seed < _SEED_BOUND:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return int(seed)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise level given as SNR in decibels."""

    snr_db: float
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")
        _check_seed(self.seed)


def prbs(n: int, register_length: int = DEFAULT_REGISTER_LENGTH, seed: int = 0) -> np.ndarray:
    """Pseudo-random binary sequence of length ``n`` with values in {-1, +1}.

    Produced by a maximal-length linear feedback shift register; the initial
    register state is derived from ``seed`` (the all-zero lockup state is
    excluded by construction).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    taps = _PRIMITIVE_TAPS.get(register_length)
    if taps is None:
        supported = sorted(_PRIMITIVE_TAPS)
        raise ValueError(
            f"unsupported register length {register_length}; "
            f"supported: {supported[0]}..{supported[-1]}"
        )
    seed = _check_seed(seed)
    r = register_length
    mask = 2**r - 1
    state = seed % mask + 1  # in [1, 2**r - 1]; all-zero lockup state excluded
    # recurrence u(t) = XOR of u(t - (r - e)) over the non-leading exponents e
    # of the feedback polynomial x^r + sum(x^e) + 1
    positions = [r - e - 1 for e in taps + (0,) if e != r]
    out = np.empty(n)
    for k in range(n):
        bit = 0
        for p in positions:
            bit ^= state >> p
        bit &= 1
        state = ((state << 1) | bit) & mask
        out[k] = 1.0 if bit == 0 else -1.0
    return out


def awgn_for_snr(reference, spec: NoiseSpec) -> np.ndarray:
    """Zero-mean Gaussian noise sized so var(noise) = var(reference) / 10^(snr/10).

    ``reference`` is the noise-free signal the SNR is measured against; its
    empirical variance sets the noise power.
    """
    reference = np.asarray(reference, dtype=float)
    if reference.size == 0:
        raise ValueError("reference signal must be nonempty")
    ref_var = float(np.var(reference))
    if ref_var == 0.0:
        raise ValueError("reference signal has zero variance; SNR is undefined")
    target_var = ref_var / 10.0 ** (spec.snr_db / 10.0)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    return np.sqrt(target_var) * rng.standard_normal(reference.size)
