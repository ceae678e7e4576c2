"""
Prequential Service

One-step-ahead rolling evaluation of order-selection criteria on a single
observed series. At every step n > n0 each criterion is refit on the data
strictly before n (all of it, or the last ``window`` points), its chosen
filter predicts x_n and the squared error is recorded together with the
cumulated and windowed averages.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ar_bridge.core.errors import (ContractError, DegenerateDataError, DomainError,
                                   InsufficientDataError, SingularMatrixError)
from ar_bridge.models import Filter
from ar_bridge.schemas.prequential import PrequentialConfig, WindowMode
from ar_bridge.schemas.selection import Criterion
from ar_bridge.services.criteria import default_params, select_orders
from ar_bridge.services.fit import fit, predict_one_step

logger = logging.getLogger(__name__)

AGGREGATES = ("cum_avg", "win_avg")


@dataclass
class CriterionTrace:
    """Per-step record of one criterion; index i holds time step n0 + 1 + i (1-based)."""

    orders: List[int] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    degenerate: List[bool] = field(default_factory=list)
    cum_avg: Optional[np.ndarray] = None
    win_avg: Optional[np.ndarray] = None
    cum_avg_norm: Optional[np.ndarray] = None
    win_avg_norm: Optional[np.ndarray] = None


@dataclass
class PrequentialSeries:
    n0: int
    steps: np.ndarray
    traces: Dict[Criterion, CriterionTrace]

    def to_frame(self) -> pd.DataFrame:
        """Long table with columns n, criterion, order, err, cum_avg, win_avg, cum_avg_norm, win_avg_norm."""
        frames = []
        for criterion, trace in self.traces.items():
            frames.append(pd.DataFrame({
                "n": self.steps,
                "criterion": criterion.value,
                "order": trace.orders,
                "err": trace.errors,
                "cum_avg": trace.cum_avg,
                "win_avg": trace.win_avg,
                "cum_avg_norm": trace.cum_avg_norm if trace.cum_avg_norm is not None else np.nan,
                "win_avg_norm": trace.win_avg_norm if trace.win_avg_norm is not None else np.nan,
            }))
        return pd.concat(frames, ignore_index=True)


def cumulated_average(errors: np.ndarray) -> np.ndarray:
    """e_bar_n = sum_{t=n0+1}^{n} e_t / (n - n0)."""
    return np.cumsum(errors) / np.arange(1, errors.size + 1)


def windowed_average(errors: np.ndarray, avg_window: int) -> np.ndarray:
    """Mean of e_t over t = s+1..n with s = max(n0, n - avg_window)."""
    sums = np.concatenate(([0.0], np.cumsum(errors)))
    ends = np.arange(1, errors.size + 1)
    starts = np.maximum(0, ends - avg_window)
    return (sums[ends] - sums[starts]) / (ends - starts)


def training_slice(data: np.ndarray, n: int, config: PrequentialConfig) -> np.ndarray:
    """Observations used to predict x_n (1-based): x_1..x_{n-1}, or the last ``window`` of them."""
    if config.mode == WindowMode.SLIDING:
        return data[max(0, n - 1 - config.training_width): n - 1]
    return data[: n - 1]


def run_prequential(data, config: PrequentialConfig) -> PrequentialSeries:
    """
    Evaluate every configured criterion at steps n = n0+1..len(data).

    A step whose fit is degenerate reuses the criterion's previous filter (or
    the zero predictor before any fit succeeded) and is flagged.
    """
    data = np.asarray(data, dtype=float).reshape(-1)
    if not data.size > config.n0 + 1:
        raise InsufficientDataError(
            f"series of length {data.size} needs more than n0 + 1 = {config.n0 + 1} points",
            length=data.size, n0=config.n0,
        )
    if not np.all(np.isfinite(data)):
        raise DomainError("series contains non-finite values")

    criteria = [Criterion(criterion) for criterion in config.criteria]
    traces = {criterion: CriterionTrace() for criterion in criteria}
    previous: Dict[Criterion, Filter] = {criterion: Filter.white_noise() for criterion in criteria}
    steps = np.arange(config.n0 + 1, data.size + 1)

    for n in steps:
        train = training_slice(data, n, config)
        degenerate = False
        try:
            params = default_params(train.size)
            logger.debug(f"step {n}: training length {train.size}, L_max {params.L_max}")
            table = fit(train, params.L_max)
            result = select_orders(table, params, criteria)
            for criterion in criteria:
                previous[criterion] = table.filters[result.chosen[criterion]]
        except (SingularMatrixError, DegenerateDataError, InsufficientDataError, DomainError) as e:
            logger.warning(f"step {n}: {e.message}; reusing previous filters")
            degenerate = True

        for criterion in criteria:
            filter = previous[criterion]
            error = (data[n - 1] - predict_one_step(filter, train)) ** 2
            trace = traces[criterion]
            trace.orders.append(filter.order)
            trace.errors.append(float(error))
            trace.degenerate.append(degenerate)

    for trace in traces.values():
        errors = np.asarray(trace.errors)
        trace.cum_avg = cumulated_average(errors)
        trace.win_avg = windowed_average(errors, config.avg_window)

    series = PrequentialSeries(n0=config.n0, steps=steps, traces=traces)
    if Criterion.AIC in traces and Criterion.BIC in traces:
        series = normalize_against_best(series)
    return series


def normalize_against_best(series: PrequentialSeries) -> PrequentialSeries:
    """Subtract the pointwise minimum of the AIC and BIC curves from each aggregate, kind by kind."""
    missing = [c.value for c in (Criterion.AIC, Criterion.BIC) if c not in series.traces]
    if missing:
        raise ContractError(f"normalization needs AIC and BIC curves, missing {missing}", missing=missing)

    aic, bic = series.traces[Criterion.AIC], series.traces[Criterion.BIC]
    for kind in AGGREGATES:
        best = np.minimum(getattr(aic, kind), getattr(bic, kind))
        for trace in series.traces.values():
            setattr(trace, f"{kind}_norm", getattr(trace, kind) - best)
    return series


def demean(series) -> np.ndarray:
    series = np.asarray(series, dtype=float).reshape(-1)
    return series - series.mean()


def deseasonalize(series, period: int) -> np.ndarray:
    """Subtract from every value the mean of its calendar position (index modulo ``period``)."""
    series = np.asarray(series, dtype=float).reshape(-1)
    if period < 1:
        raise DomainError(f"period must be positive, got {period}", period=period)
    positions = np.arange(series.size) % period
    means = pd.Series(series).groupby(positions).transform("mean").to_numpy()
    return series - means
