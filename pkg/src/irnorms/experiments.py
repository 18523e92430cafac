"""Config-driven norm-estimation experiments with CSV reporting.

Every experiment is deterministic given its configuration: the excitation is
one PRBS fixed by the master seed, and each (system, SNR, run) cell gets a
noise realization from a seed derived by a collision-free offset, so repeated
invocations produce bitwise-identical CSV output.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (
    ESTIMATOR_LS,
    ESTIMATOR_TC,
    ExperimentConfig,
    canonical_estimator,
    derive_seed,
)
from .identify import (
    build_regression,
    ls_estimate,
    regularized_estimate,
    tune_hyperparameters,
)
from .loop import Dataset, read_dataset_csv, run_closed_loop
from .lti import NormTriple, closed_loop, is_stable, simulate, true_norms
from .norms import h1_from_ir, h2_from_ir, hinf_from_ir
from .signals import NoiseSpec, awgn_for_snr, prbs

NORM_NAMES = ("H1", "H2", "Hinf")


@dataclass(frozen=True)
class RunResult:
    """One estimated norm with its reference value and provenance."""

    system: object  # loop id (int) or dataset label (str)
    norm: str
    snr_db: float
    run: int
    real: float | None
    estimate: float
    percent_error: float | None
    seed: int


@dataclass(frozen=True)
class SweepOutcome:
    results: tuple
    mpe: dict  # norm name -> mean percent error across the sweep


@dataclass(frozen=True)
class MonteCarloOutcome:
    results: dict  # estimator -> tuple of RunResult
    mpe: dict  # (norm, estimator) -> overall MPE
    mpe_by_snr: dict  # (norm, estimator, snr_db) -> MPE
    reduction_pct: dict  # norm -> percent reduction of TC MPE vs LS MPE
    dataset_checksums: dict  # estimator -> tuple of sha256 hex digests


def percent_error(real_value: float, estimate: float) -> float:
    """100 |estimate - real| / real; the reference value must be positive."""
    if not real_value > 0:
        raise ValueError("percent error needs a positive reference value")
    return 100.0 * abs(estimate - real_value) / real_value


def mean_percent_error(results) -> float:
    """Arithmetic mean of the percent errors of a nonempty result list."""
    errors = [r.percent_error if isinstance(r, RunResult) else float(r) for r in results]
    if not errors:
        raise ValueError("cannot average an empty result list")
    if any(e is None for e in errors):
        raise ValueError("every result must carry a percent error")
    return float(np.mean(errors))


def identify_impulse_response(data: Dataset, order: int, estimator: str) -> np.ndarray:
    """Estimated impulse-response coefficients g(0..order) from a dataset."""
    estimator = canonical_estimator(estimator)
    problem = build_regression(data, order)
    if estimator == ESTIMATOR_LS:
        return ls_estimate(problem)
    params = tune_hyperparameters(problem)
    return regularized_estimate(problem, params)


def estimate_norms(data: Dataset, order: int, estimator: str) -> NormTriple:
    g = identify_impulse_response(data, order, estimator)
    return NormTriple(h1_from_ir(g), h2_from_ir(g), hinf_from_ir(g))


def estimate_from_csv(path, order: int, estimator: str) -> NormTriple:
    """Identification plus norm estimation for a logged `k,r,v` dataset file."""
    data = read_dataset_csv(path)
    if len(data) <= order:
        raise ValueError(f"dataset has N={len(data)} samples; need N > M={order}")
    return estimate_norms(data, order, estimator)


def _dataset_checksum(data: Dataset) -> str:
    digest = hashlib.sha256()
    digest.update(data.r.tobytes())
    digest.update(data.v.tobytes())
    return digest.hexdigest()


def _cell_dataset(G, C, T, r, snr_db: float, seed: int) -> Dataset:
    if math.isinf(snr_db):
        noise = np.zeros(r.size)
    else:
        noise = awgn_for_snr(simulate(T, r), NoiseSpec(snr_db=snr_db, seed=seed))
    return run_closed_loop(G, C, r, noise)


def _prepared_loops(config: ExperimentConfig):
    """Closed-loop pairs (S, T) and reference norms, with stability enforced."""
    prepared = []
    for sys_index, (G, C) in enumerate(config.systems):
        S, T = closed_loop(G, C)
        if not is_stable(S):
            raise ValueError(f"system {sys_index + 1}: closed loop is unstable")
        prepared.append((S, T, true_norms(S)))
    return prepared


def _norm_results(system_id, est: NormTriple, real: NormTriple, snr_db, run, seed):
    out = []
    for name, est_val, real_val in zip(NORM_NAMES, est, real):
        out.append(
            RunResult(
                system=system_id,
                norm=name,
                snr_db=snr_db,
                run=run,
                real=real_val,
                estimate=est_val,
                percent_error=percent_error(real_val, est_val),
                seed=seed,
            )
        )
    return out


def run_table(config: ExperimentConfig) -> list:
    """One estimation per configured system at a single SNR.

    Returns one RunResult per (system, norm), comparing the identified norms
    against the model-computed reference values.
    """
    if len(config.snr) != 1:
        raise ValueError("run_table expects a single SNR value (scalar or inf)")
    snr_db = config.snr.points[0]
    r = prbs(config.n_samples, config.register_length, config.master_seed)
    prepared = _prepared_loops(config)
    results = []
    for sys_index, ((G, C), (S, T, real)) in enumerate(zip(config.systems, prepared)):
        seed = derive_seed(config.master_seed, sys_index, 0, 0)
        data = _cell_dataset(G, C, T, r, snr_db, seed)
        est = estimate_norms(data, config.ir_length, config.estimator)
        results.extend(_norm_results(sys_index + 1, est, real, snr_db, 0, seed))
    return results


def run_snr_sweep(config: ExperimentConfig) -> SweepOutcome:
    """One estimation per SNR grid point per system, plus per-norm MPE."""
    r = prbs(config.n_samples, config.register_length, config.master_seed)
    prepared = _prepared_loops(config)
    results = []
    for sys_index, ((G, C), (S, T, real)) in enumerate(zip(config.systems, prepared)):
        for snr_index, snr_db in enumerate(config.snr.points):
            seed = derive_seed(config.master_seed, sys_index, snr_index, 0)
            data = _cell_dataset(G, C, T, r, snr_db, seed)
            est = estimate_norms(data, config.ir_length, config.estimator)
            results.extend(_norm_results(sys_index + 1, est, real, snr_db, 0, seed))
    mpe = {
        name: mean_percent_error([x for x in results if x.norm == name])
        for name in NORM_NAMES
    }
    return SweepOutcome(results=tuple(results), mpe=mpe)


def run_monte_carlo(config: ExperimentConfig) -> MonteCarloOutcome:
    """Paired comparison of the regularized and plain-LS estimators.

    For every (system, SNR, run) cell both estimators consume the identical
    dataset (same derived seed); checksums of what each estimator saw are
    recorded and verified equal.
    """
    if config.runs < 2:
        raise ValueError("Monte Carlo needs at least 2 runs")
    estimators = (ESTIMATOR_TC, ESTIMATOR_LS)
    r = prbs(config.n_samples, config.register_length, config.master_seed)
    prepared = _prepared_loops(config)
    results = {est: [] for est in estimators}
    checksums = {est: [] for est in estimators}
    for sys_index, ((G, C), (S, T, real)) in enumerate(zip(config.systems, prepared)):
        for snr_index, snr_db in enumerate(config.snr.points):
            for run_index in range(config.runs):
                seed = derive_seed(config.master_seed, sys_index, snr_index, run_index)
                data = _cell_dataset(G, C, T, r, snr_db, seed)
                for est_name in estimators:
                    checksums[est_name].append(_dataset_checksum(data))
                    est = estimate_norms(data, config.ir_length, est_name)
                    results[est_name].extend(
                        _norm_results(sys_index + 1, est, real, snr_db, run_index, seed)
                    )
    if checksums[estimators[0]] != checksums[estimators[1]]:
        raise RuntimeError("pairing audit failed: estimators saw different datasets")

    mpe = {}
    mpe_by_snr = {}
    for est_name in estimators:
        for name in NORM_NAMES:
            rows = [x for x in results[est_name] if x.norm == name]
            mpe[(name, est_name)] = mean_percent_error(rows)
            for snr_db in config.snr.points:
                cell = [x for x in rows if x.snr_db == snr_db]
                mpe_by_snr[(name, est_name, snr_db)] = mean_percent_error(cell)
    reduction = {}
    for name in NORM_NAMES:
        ls = mpe[(name, ESTIMATOR_LS)]
        tc = mpe[(name, ESTIMATOR_TC)]
        reduction[name] = 100.0 * (ls - tc) / ls if ls > 0 else 0.0
    return MonteCarloOutcome(
        results={k: tuple(v) for k, v in results.items()},
        mpe=mpe,
        mpe_by_snr=mpe_by_snr,
        reduction_pct=reduction,
        dataset_checksums={k: tuple(v) for k, v in checksums.items()},
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_float(value) -> str:
    return "" if value is None else repr(float(value))


RESULT_HEADER = "system,norm,snr_db,run,real,estimate,percent_error,seed"
SUMMARY_HEADER = "norm,estimator,mpe"


def results_csv_text(results) -> str:
    lines = [RESULT_HEADER]
    for x in results:
        lines.append(
            ",".join(
                [
                    _fmt(x.system),
                    x.norm,
                    _fmt_float(x.snr_db),
                    _fmt(x.run),
                    _fmt_float(x.real),
                    _fmt_float(x.estimate),
                    _fmt_float(x.percent_error),
                    _fmt(x.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def summary_csv_text(rows) -> str:
    """Rows are (norm, estimator-or-label, mpe) triples."""
    lines = [SUMMARY_HEADER]
    for norm, label, value in rows:
        lines.append(f"{norm},{label},{_fmt(float(value))}")
    return "\n".join(lines) + "\n"


def write_results_csv(results, path) -> None:
    Path(path).write_text(results_csv_text(results))


def write_summary_csv(rows, path) -> None:
    Path(path).write_text(summary_csv_text(rows))
