"""
Experiments Service

Config-driven Monte Carlo studies:
- order-selection studies: histograms of the orders chosen by each criterion
- mismatch studies: mean mismatch error, its standard error, the mean
  parametricness index and the cost ratio against the universally optimal order

Replication r at sample size index i draws from its own RngStream, so the
report is the same whatever the number of worker threads.
"""

import json
import logging
import math
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ar_bridge.core.config import get_settings
from ar_bridge.core.errors import (CapTooSmallError, ConfigError, DegenerateDataError, DomainError,
                                   SingularMatrixError, SpecError)
from ar_bridge.models import RngStream
from ar_bridge.schemas.experiment import (ExperimentConfig, ExperimentReport,
                                          ReportRow, StudyKind)
from ar_bridge.schemas.process import ProcessKind
from ar_bridge.schemas.selection import Criterion, CriterionParams
from ar_bridge.services.criteria import PAPER_DEFAULT, default_params, select_orders
from ar_bridge.services.fit import fit
from ar_bridge.services.process import cost_curve, mismatch_error, simulate, universally_optimal_order

logger = logging.getLogger(__name__)

# Criterion column used for per-replication quantities that no single criterion owns
ALL = "all"

_STREAM_BITS = 32


def replication_stream(master_seed: int, n_index: int, r_index: int) -> RngStream:
    """Stream (n_index << 32) | r_index of ``master_seed``."""
    if not 0 <= r_index < 2 ** _STREAM_BITS or n_index < 0:
        raise DomainError(f"replication indices out of range: n_index={n_index}, r_index={r_index}")
    return RngStream(master_seed, (n_index << _STREAM_BITS) | r_index)


def params_for(config: ExperimentConfig, N: int) -> CriterionParams:
    if config.params_policy == PAPER_DEFAULT:
        return default_params(N)
    return config.params_policy


@dataclass(frozen=True)
class ReplicationRecord:
    """Outcome of one replication; ``chosen`` is None when the fit was degenerate."""

    chosen: Optional[Dict[Criterion, int]]
    mismatch: Optional[Dict[Criterion, float]] = None
    pi: Optional[float] = None


def _replicate(config: ExperimentConfig, N: int, n_index: int, r_index: int,
               params: CriterionParams, with_mismatch: bool) -> ReplicationRecord:
    rng = replication_stream(config.master_seed, n_index, r_index)
    data = simulate(config.truth, N + params.L_max, rng, N=N, burnin=config.burnin)
    try:
        table = fit(data, params.L_max)
    except (SingularMatrixError, DegenerateDataError) as e:
        logger.warning(f"N={N} replication {r_index} is degenerate: {e.message}")
        return ReplicationRecord(chosen=None)

    result = select_orders(table, params, config.criteria)
    chosen = dict(result.chosen)
    if not with_mismatch:
        return ReplicationRecord(chosen=chosen)
    mismatch = {
        criterion: mismatch_error(table.filters[order], config.truth, N)
        for criterion, order in chosen.items()
    }
    return ReplicationRecord(chosen=chosen, mismatch=mismatch, pi=result.pi)


def _run_replications(config: ExperimentConfig, N: int, n_index: int, params: CriterionParams,
                      with_mismatch: bool, threads: int) -> List[ReplicationRecord]:
    indices = range(config.replications)
    if threads <= 1:
        return [_replicate(config, N, n_index, r, params, with_mismatch) for r in indices]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        # map yields in submission order, i.e. by replication index
        return list(executor.map(
            lambda r: _replicate(config, N, n_index, r, params, with_mismatch), indices
        ))


def bucket_label(bucket: Union[int, str]) -> str:
    return str(bucket)


def bucket_of(order: int, buckets: List[Union[int, str]]) -> str:
    """Label of the bucket holding ``order``; validated bucket lists end in a '>k' overflow."""
    for bucket in buckets:
        if isinstance(bucket, str):
            if order > int(bucket[1:]):
                return bucket
        elif order == bucket:
            return bucket_label(bucket)
    raise DomainError(f"order {order} falls in none of the buckets {buckets}", order=order)


def _mean_and_se(values: List[float]):
    array = np.asarray(values, dtype=float)
    if array.size == 0:
        return math.nan, math.nan
    se = float(np.std(array, ddof=1) / math.sqrt(array.size)) if array.size > 1 else 0.0
    return float(np.mean(array)), se


def run_order_selection_study(config: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """Order-count histograms per (N, criterion), with degenerate replications counted apart."""
    if config.truth.kind != ProcessKind.FINITE_AR:
        raise SpecError("order-selection studies need a finite AR truth", kind=config.truth.kind.value)
    threads = threads or get_settings().THREADS
    start = time.time()
    rows: List[ReportRow] = []
    histograms: Dict[int, Dict[str, Dict[int, int]]] = {}
    degenerate: Dict[int, int] = {}

    for n_index, N in enumerate(config.sample_sizes):
        params = params_for(config, N)
        logger.info(f"{config.name}: N={N}, L_max={params.L_max}, {config.replications} replications")
        records = _run_replications(config, N, n_index, params, False, threads)
        valid = [record for record in records if record.chosen is not None]
        degenerate[N] = len(records) - len(valid)
        histograms[N] = {}

        for criterion in config.criteria:
            orders = [record.chosen[criterion] for record in valid]
            histograms[N][criterion.value] = {
                int(order): int(count) for order, count in zip(*np.unique(orders, return_counts=True))
            }
            counts = {bucket_label(bucket): 0 for bucket in config.order_buckets}
            for order in orders:
                counts[bucket_of(order, config.order_buckets)] += 1
            for label, count in counts.items():
                rows.append(ReportRow(N=N, criterion=criterion.value, metric=f"count_{label}", value=count))
                proportion = count / len(valid) if valid else math.nan
                rows.append(ReportRow(N=N, criterion=criterion.value, metric=f"proportion_{label}", value=proportion))
        rows.append(ReportRow(N=N, criterion=ALL, metric="degenerate", value=degenerate[N]))

    return ExperimentReport(
        config=config, rows=_ordered(rows, config), histograms=histograms,
        degenerate=degenerate, seed=config.master_seed, wall_time=time.time() - start,
    )


def _cost_oracle(config: ExperimentConfig, N: int) -> Optional[np.ndarray]:
    """C_N(L) over 0..cap divided by its minimum, or None when the oracle cannot be evaluated."""
    cap = max(N // 2, 2)
    try:
        optimum = universally_optimal_order(N, config.truth, cap)
    except CapTooSmallError:
        logger.warning(f"N={N}: cost minimum sits at the cap {cap}; skipping cost ratios")
        return None
    curve = cost_curve(N, config.truth, cap)
    return curve / curve[optimum]


def run_mismatch_study(config: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """Mean mismatch error and standard error per criterion, plus the parametricness index."""
    threads = threads or get_settings().THREADS
    start = time.time()
    rows: List[ReportRow] = []
    degenerate: Dict[int, int] = {}

    for n_index, N in enumerate(config.sample_sizes):
        params = params_for(config, N)
        logger.info(f"{config.name}: N={N}, L_max={params.L_max}, {config.replications} replications")
        records = _run_replications(config, N, n_index, params, True, threads)
        valid = [record for record in records if record.chosen is not None]
        degenerate[N] = len(records) - len(valid)
        ratios = _cost_oracle(config, N)

        for criterion in config.criteria:
            mean, se = _mean_and_se([record.mismatch[criterion] for record in valid])
            rows.append(ReportRow(N=N, criterion=criterion.value, metric="mismatch_mean", value=mean))
            rows.append(ReportRow(N=N, criterion=criterion.value, metric="mismatch_se", value=se))
            if ratios is not None:
                orders = [record.chosen[criterion] for record in valid]
                value = float(np.mean(ratios[orders])) if orders else math.nan
                rows.append(ReportRow(N=N, criterion=criterion.value, metric="cost_ratio_mean", value=value))

        pi_mean, pi_se = _mean_and_se([record.pi for record in valid])
        rows.append(ReportRow(N=N, criterion=ALL, metric="pi_mean", value=pi_mean))
        rows.append(ReportRow(N=N, criterion=ALL, metric="pi_se", value=pi_se))
        rows.append(ReportRow(N=N, criterion=ALL, metric="degenerate", value=degenerate[N]))

    return ExperimentReport(
        config=config, rows=_ordered(rows, config), degenerate=degenerate,
        seed=config.master_seed, wall_time=time.time() - start,
    )


def run_study(config: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    if config.study == StudyKind.ORDER_SELECTION:
        return run_order_selection_study(config, threads)
    return run_mismatch_study(config, threads)


def _ordered(rows: List[ReportRow], config: ExperimentConfig) -> List[ReportRow]:
    """Sort by N, then the config's criterion order (``all`` last), then metric name."""
    rank = {criterion.value: i for i, criterion in enumerate(config.criteria)}
    rank[ALL] = len(rank)
    return sorted(rows, key=lambda row: (row.N, rank[row.criterion], row.metric))


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    return pd.DataFrame(
        [row.model_dump() for row in report.rows], columns=["N", "criterion", "metric", "value"]
    )


def report_to_csv(report: ExperimentReport) -> str:
    """One row per (N, criterion, metric); floats are written with repr so reruns are byte-identical."""
    frame = report_frame(report)
    frame["value"] = frame["value"].map(repr)
    return frame.to_csv(index=False, lineterminator="\n")


def report_to_json(report: ExperimentReport) -> str:
    return report.model_dump_json(indent=2)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read an ExperimentConfig from a .toml or .json file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}", path=str(path))
    try:
        document = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}", path=str(path))
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}", path=str(path), errors=e.errors(include_url=False))
