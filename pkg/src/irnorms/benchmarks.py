"""Five benchmark closed loops (plant G, controller C) used by the experiments.

All controllers contain an integrator, so every sensitivity function S is
biproper with S(1) = 0; the set covers first and second order plants, complex
poles, a non-minimum-phase zero, and a fourth-order resonant plant.
"""
from __future__ import annotations

import numpy as np

from .lti import TransferFunction


def _poly(*roots, gain=1.0):
    p = np.array([1.0])
    for r in roots:
        p = np.polymul(p, [1.0, -r])
    return gain * p


def _loops():
    return {
        1: (
            TransferFunction([0.5], _poly(0.9)),
            TransferFunction(_poly(0.9, gain=0.3797), _poly(1.0)),
        ),
        2: (
            TransferFunction(_poly(0.5, gain=-0.1), _poly(0.9, 0.8)),
            TransferFunction(_poly(0.9719, gain=-1.1600), _poly(1.0)),
        ),
        3: (
            TransferFunction(_poly(0.6, gain=-0.05), [1.0, -1.8, 0.82]),
            TransferFunction(_poly(0.9351, 0.4210, gain=-3.7144), _poly(0.0, 1.0)),
        ),
        4: (
            TransferFunction(_poly(1.4, gain=-0.05), _poly(0.9, 0.8)),
            TransferFunction(_poly(0.9, 0.8, gain=4.7942), _poly(0.0, 1.0)),
        ),
        5: (
            TransferFunction(
                3.605 * np.polymul(_poly(0.55), [1.0, -1.62, 0.6586]),
                np.polymul([1.0, -1.84, 0.8564], [1.0, -1.26, 0.4069]),
            ),
            TransferFunction(_poly(0.8977, gain=0.0519), _poly(1.0)),
        ),
    }


BENCHMARK_IDS = (1, 2, 3, 4, 5)


def benchmark_loop(index: int):
    """Plant/controller pair for benchmark loop ``index`` (1 through 5)."""
    loops = _loops()
    if index not in loops:
        raise ValueError(f"unknown benchmark loop {index}; available: {BENCHMARK_IDS}")
    return loops[index]


def all_benchmark_loops():
    """All five loops as an ordered {index: (G, C)} mapping."""
    return _loops()
