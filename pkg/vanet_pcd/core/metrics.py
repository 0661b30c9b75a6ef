"""
Evaluation metrics computed from simulation traces
Cumulative service, average delay, transmitters and switch operations per slot
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np
import pandas as pd

from vanet_pcd.utils.constants import SUMMARY_COLUMNS

if TYPE_CHECKING:
    from vanet_pcd.core.protocol import SlotReport

logger = logging.getLogger("vanet_pcd.metrics")


class DelayResult(NamedTuple):
    """Average delay in seconds; complete is False for truncated runs"""

    value: float
    complete: bool


@dataclass(frozen=True)
class Trace:
    """Ordered slot reports of one run

    Attributes:
        config: ScenarioConfig the run used
        scheme: "proposed" or "baseline"
        seed: scenario seed
        initial_total: P(0), packets held after the V2R phase
        demand: N * M
        reports: one SlotReport per executed slot, slots 1..len
    """

    config: Any
    scheme: str
    seed: int
    initial_total: int
    demand: int
    reports: Tuple["SlotReport", ...] = ()

    def __len__(self) -> int:
        return len(self.reports)

    @property
    def totals(self) -> List[int]:
        """P(t) for t = 1..len"""
        return [report.total for report in self.reports]

    @property
    def final_total(self) -> int:
        return self.reports[-1].total if self.reports else self.initial_total

    @property
    def completed(self) -> bool:
        return self.final_total == self.demand

    @property
    def completion_slot(self):
        """t_m, the slot at which P reached N * M; None when never reached"""
        if not self.completed:
            return None
        return len(self.reports)

    @property
    def completion_fraction(self) -> float:
        return self.final_total / self.demand

    @property
    def total_switches(self) -> int:
        return sum(report.switch_count for report in self.reports)


def _delay_from_totals(totals: Sequence[int], demand: int, num_obus: int, slot_length: float) -> float:
    deficit = sum(demand - total for total in totals)
    return deficit * slot_length / num_obus


def average_delay(trace: Trace) -> DelayResult:
    """(T/N) * sum over t = 1..t_m of (NM - P(t)), using realized P(t)

    Truncated runs return the partial sum over the recorded slots.
    """
    config = trace.config
    value = _delay_from_totals(trace.totals, trace.demand, config.N, config.T)
    return DelayResult(value=value, complete=trace.completed)


def standard_average_delay(N: int, M: int, T: float) -> Tuple[float, float]:
    """Average delay of the one-packet-per-slot reference scheme

    Returns:
        (exact, approx): (T/N) sum_{t=1}^{NM} (NM - t) and NM^2 T / 2
    """
    if N < 1 or M < 1:
        raise ValueError(f"N and M must be at least 1, got N={N}, M={M}")
    demand = N * M
    exact = T / N * demand * (demand - 1) / 2.0
    approx = demand * M * T / 2.0
    return exact, approx


def per_slot_series(trace: Trace) -> List[Dict[str, Any]]:
    """One row per slot: normalized P, transmitters, switches, subnetworks, components, deliveries"""
    return [report.to_dict() for report in trace.reports]


def delay_from_deliveries(trace: Trace) -> float:
    """Average delay rebuilt from the delivery log instead of the reported totals"""
    totals = np.cumsum([len(report.deliveries) for report in trace.reports], dtype=int) + trace.initial_total
    return _delay_from_totals(totals.tolist(), trace.demand, trace.config.N, trace.config.T)


def summarize(trace: Trace, wall_time: float = 0.0) -> Dict[str, Any]:
    """Summary record of one run, keyed by the summary CSV columns"""
    config = trace.config
    transmitters = [report.num_transmitters for report in trace.reports]
    record = {
        "scheme": trace.scheme,
        "seed": trace.seed,
        "N": config.N,
        "L": config.fleet_length,
        "D": config.D,
        "average_delay": average_delay(trace).value,
        "completed": trace.completed,
        "completion_slot": trace.completion_slot,
        "completion_fraction": trace.completion_fraction,
        "total_switches": trace.total_switches,
        "slots": len(trace),
        "mean_transmitters": float(np.mean(transmitters)) if transmitters else 0.0,
        "wall_time": wall_time,
    }
    return {column: record[column] for column in SUMMARY_COLUMNS}


def aggregate_summaries(rows: Iterable[Dict[str, Any]],
                        by: Sequence[str] = ("scheme", "N", "L", "D")) -> pd.DataFrame:
    """Mean of the summary metrics across seeds for every sweep point

    Returns:
        DataFrame with one row per group, a ``seeds`` count column and the
        per-group means of the numeric metrics
    """
    frame = pd.DataFrame(list(rows), columns=SUMMARY_COLUMNS)
    if frame.empty:
        return pd.DataFrame(columns=list(by) + ["seeds"])

    frame["completed"] = frame["completed"].astype(float)
    metrics = ["average_delay", "completed", "completion_fraction",
               "total_switches", "slots", "mean_transmitters", "wall_time"]
    grouped = frame.groupby(list(by), sort=True)
    aggregated = grouped[metrics].mean()
    aggregated.insert(0, "seeds", grouped.size())
    return aggregated.reset_index()


def service_curve(trace: Trace, horizon: int) -> np.ndarray:
    """Normalized P(t) for t = 0..horizon, held at its last value after the trace ends"""
    totals = [trace.initial_total] + trace.totals
    curve = np.full(horizon + 1, totals[-1] / trace.demand)
    count = min(len(totals), horizon + 1)
    curve[:count] = np.asarray(totals[:count], dtype=float) / trace.demand
    return curve


def mean_service_curve(traces: Sequence[Trace], horizon: int) -> np.ndarray:
    """Mean normalized P(t), t = 0..horizon, across traces"""
    if not traces:
        raise ValueError("Cannot average an empty collection of traces")
    return np.mean([service_curve(trace, horizon) for trace in traces], axis=0)


def mean_switch_curve(traces: Sequence[Trace], horizon: int) -> np.ndarray:
    """Mean switch operations per slot, t = 1..horizon; slots after completion count as 0"""
    if not traces:
        raise ValueError("Cannot average an empty collection of traces")
    curves = np.zeros((len(traces), horizon))
    for row, trace in enumerate(traces):
        counts = [report.switch_count for report in trace.reports[:horizon]]
        curves[row, :len(counts)] = counts
    return curves.mean(axis=0)
