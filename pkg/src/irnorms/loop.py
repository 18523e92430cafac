"""Closed-loop simulation producing identification datasets.

A reference r(k) drives the loop, zero-mean noise n(k) enters at the measured
output, and the recorded pair is {r(k), v(k) = r(k) - y(k)}.  Because
y = T r + S n with S + T = 1, the recorded v equals S applied to (r - n), so
the dataset identifies the sensitivity function directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lti import TransferFunction, closed_loop, simulate


@dataclass(frozen=True)
class Dataset:
    """Paired excitation/response records used for identification."""

    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if r.ndim != 1 or v.ndim != 1 or r.size == 0:
            raise ValueError("r and v must be nonempty 1-d sequences")
        if r.size != v.size:
            raise ValueError(f"length mismatch: len(r)={r.size}, len(v)={v.size}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("dataset samples must all be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)

    def __len__(self):
        return self.r.size


def run_closed_loop(G: TransferFunction, C: TransferFunction, r, noise) -> Dataset:
    """Simulate the noisy loop and return the dataset {r, v = r - y}.

    The loop is realized through the composed sensitivity function, so the
    returned v is exactly S applied to (r - noise) from zero initial
    conditions.  An algebraically degenerate loop is rejected, and a
    diverging simulation aborts with the index of the first bad sample.
    """
    r = np.asarray(r, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if r.shape != noise.shape or r.ndim != 1:
        raise ValueError("r and noise must be 1-d sequences of equal length")
    S, _ = closed_loop(G, C)
    v = simulate(S, r - noise)
    bad = np.nonzero(~np.isfinite(v))[0]
    if bad.size:
        raise ArithmeticError(f"non-finite loop output at sample index {bad[0]}")
    return Dataset(r=r, v=v)


def write_dataset_csv(dataset: Dataset, path) -> None:
    """Write `k,r,v` rows at full double precision (17 significant digits)."""
    lines = ["k,r,v"]
    for k in range(len(dataset)):
        lines.append(f"{k},{dataset.r[k]:.17g},{dataset.v[k]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_csv(path) -> Dataset:
    """Parse a `k,r,v` file; malformed rows are reported with their line number."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != "k,r,v":
        raise ValueError(f"{path}: expected header 'k,r,v'")
    r_vals, v_vals = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(parts)}")
        try:
            r_vals.append(float(parts[1]))
            v_vals.append(float(parts[2]))
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
    if not r_vals:
        raise ValueError(f"{path}: no data rows")
    return Dataset(r=np.array(r_vals), v=np.array(v_vals))
