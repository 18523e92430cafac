"""Experiment configuration: dataclasses plus a flat ``key = value`` file format.

Recognized keys::

    system.<i>.num / system.<i>.den         plant coefficient lists
    controller.<i>.num / controller.<i>.den paired controller
    N, M, runs, seed                        integers
    snr_db                                  scalar, `start:stop:step`,
                                            comma list, or `inf`
    estimator                               regularized-tc | plain-ls
    register_length                         PRBS register length (optional)

Coefficient lists are comma separated, descending powers of z, e.g.
``system.1.num = 0.5`` with ``system.1.den = 1,-0.9``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .lti import TransferFunction
from .signals import DEFAULT_REGISTER_LENGTH, _check_seed

ESTIMATOR_TC = "regularized-tc"
ESTIMATOR_LS = "plain-ls"
_ESTIMATOR_ALIASES = {
    ESTIMATOR_TC: ESTIMATOR_TC,
    ESTIMATOR_LS: ESTIMATOR_LS,
    "tc": ESTIMATOR_TC,
    "ls": ESTIMATOR_LS,
}


def canonical_estimator(name: str) -> str:
    est = _ESTIMATOR_ALIASES.get(name.strip().lower())
    if est is None:
        raise ValueError(f"unknown estimator {name!r}; use 'tc' or 'ls'")
    return est


@dataclass(frozen=True)
class SnrGrid:
    """SNR evaluation points in dB; a single +inf point means noise-free."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if not pts:
            raise ValueError("SNR grid must contain at least one point")
        for p in pts:
            if math.isnan(p) or p == -math.inf:
                raise ValueError("SNR points must be finite or +inf")
        if math.inf in pts and len(pts) > 1:
            raise ValueError("the noise-free sentinel cannot be mixed with finite SNRs")
        object.__setattr__(self, "points", pts)

    @classmethod
    def scalar(cls, snr_db: float) -> "SnrGrid":
        return cls((snr_db,))

    @classmethod
    def sweep(cls, start: float, stop: float, step: float) -> "SnrGrid":
        if step <= 0:
            raise ValueError("sweep step must be positive")
        if stop < start:
            raise ValueError("sweep stop must be >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return cls(tuple(start + k * step for k in range(count)))

    @property
    def noise_free(self) -> bool:
        return self.points == (math.inf,)

    def __len__(self):
        return len(self.points)


def parse_snr_spec(text: str) -> SnrGrid:
    """Parse `10`, `1:50:1`, `1,5,10,20`, or `inf`."""
    text = text.strip()
    if text.lower() == "inf":
        return SnrGrid((math.inf,))
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep spec must be start:stop:step, got {text!r}")
        return SnrGrid.sweep(*(float(p) for p in parts))
    if "," in text:
        return SnrGrid(tuple(float(p) for p in text.split(",")))
    return SnrGrid.scalar(float(text))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to run a reproducible norm-estimation experiment."""

    systems: tuple  # ((G, C), ...) transfer-function pairs
    n_samples: int
    ir_length: int
    snr: SnrGrid
    runs: int = 1
    master_seed: int = 0
    estimator: str = ESTIMATOR_TC
    register_length: int = DEFAULT_REGISTER_LENGTH

    def __post_init__(self):
        if not self.systems:
            raise ValueError("at least one (G, C) system pair is required")
        if self.ir_length < 1:
            raise ValueError("M must be at least 1")
        if self.n_samples <= self.ir_length:
            raise ValueError(f"need N > M, got N={self.n_samples}, M={self.ir_length}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        _check_seed(self.master_seed)
        object.__setattr__(self, "estimator", canonical_estimator(self.estimator))
        object.__setattr__(self, "systems", tuple(self.systems))


def derive_seed(master_seed: int, system_index: int, snr_index: int, run_index: int) -> int:
    """Collision-free per-cell seed: master XOR a positional offset."""
    return (master_seed ^ (system_index * 10**6 + snr_index * 10**3 + run_index)) % 2**64


_SYSTEM_KEY = re.compile(r"^(system|controller)\.(\d+)\.(num|den)$")


def parse_config_text(text: str, *, source: str = "<config>") -> ExperimentConfig:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}: line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in entries:
            raise ValueError(f"{source}: line {lineno}: duplicate key {key!r}")
        entries[key] = value.strip()

    tf_parts: dict[int, dict[str, str]] = {}
    plain: dict[str, str] = {}
    for key, value in entries.items():
        m = _SYSTEM_KEY.match(key)
        if m:
            role, idx, part = m.group(1), int(m.group(2)), m.group(3)
            tf_parts.setdefault(idx, {})[f"{role}.{part}"] = value
        else:
            plain[key] = value

    if not tf_parts:
        raise ValueError(f"{source}: no system definitions found")
    systems = []
    for idx in sorted(tf_parts):
        parts = tf_parts[idx]
        missing = {"system.num", "system.den", "controller.num", "controller.den"} - parts.keys()
        if missing:
            raise ValueError(f"{source}: system {idx} is missing {sorted(missing)}")
        G = TransferFunction.from_strings(parts["system.num"], parts["system.den"])
        C = TransferFunction.from_strings(parts["controller.num"], parts["controller.den"])
        systems.append((G, C))

    def require(key):
        if key not in plain:
            raise ValueError(f"{source}: missing required key {key!r}")
        return plain[key]

    return ExperimentConfig(
        systems=tuple(systems),
        n_samples=int(require("N")),
        ir_length=int(require("M")),
        snr=parse_snr_spec(require("snr_db")),
        runs=int(plain.get("runs", "1")),
        master_seed=int(plain.get("seed", "0")),
        estimator=plain.get("estimator", ESTIMATOR_TC),
        register_length=int(plain.get("register_length", str(DEFAULT_REGISTER_LENGTH))),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), source=str(path))
