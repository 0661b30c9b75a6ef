"""
Experiment management: single runs, parameter sweeps and result export
"""

import csv
import os
import itertools
import logging
import tempfile
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from vanet_pcd.core.metrics import Trace, aggregate_summaries, per_slot_series, summarize
from vanet_pcd.core.protocol import simulate
from vanet_pcd.utils.config import ScenarioConfig, emit_config
from vanet_pcd.utils.constants import (
    AGGREGATE_FILE, SUMMARY_COLUMNS, SUMMARY_FILE, TRACE_COLUMNS, TRACE_FILE_TEMPLATE,
)
from vanet_pcd.utils.logger import PerformanceTimer
from vanet_pcd.utils.random_streams import RandomStreams

logger = logging.getLogger("vanet_pcd.experiment")

CONFIG_ECHO_FILE = "config.ini"


@dataclass(frozen=True)
class RunSpec:
    """One simulation to execute: a sweep point, a scheme and a seed"""

    config: ScenarioConfig
    scheme: str
    seed: int
    directory: Path
    label: str = ""

    @property
    def trace_path(self) -> Path:
        return self.directory / TRACE_FILE_TEMPLATE.format(scheme=self.scheme, seed=self.seed)


@contextmanager
def _atomic_open(path: Path):
    """Text handle on a temporary file that replaces path once the block succeeds"""
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
            yield f
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def _write_atomically(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]]):
    """Write a CSV with header through a temporary file and an atomic rename"""
    with _atomic_open(path) as f:
        writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _format_cell(row[key]) for key in columns})


def _format_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def export_trace(trace: Trace, path: Path) -> Path:
    """Write the per-slot CSV of one run"""
    _write_atomically(Path(path), TRACE_COLUMNS, per_slot_series(trace))
    logger.debug(f"Trace written to {path}")
    return Path(path)


def export_summary(rows: Iterable[Dict[str, Any]], path: Path) -> Path:
    """Write the summary CSV, one record per run"""
    _write_atomically(Path(path), SUMMARY_COLUMNS, rows)
    logger.info(f"Summary written to {path}")
    return Path(path)


def export_aggregate(rows: Iterable[Dict[str, Any]], path: Path) -> Path:
    """Write the per-point means across seeds, one record per scheme and sweep point"""
    frame = aggregate_summaries(rows)
    with _atomic_open(Path(path)) as f:
        frame.to_csv(f, index=False, lineterminator="\n")
    logger.info(f"Seed means written to {path}")
    return Path(path)


def execute_run(spec: RunSpec) -> Dict[str, Any]:
    """Simulate one run, write its trace CSV and return its summary record

    Module level so that process pools can pickle it.
    """
    with PerformanceTimer(logger, f"{spec.scheme} run {spec.label or 'base'} seed {spec.seed}") as timer:
        trace = simulate(spec.config, scheme=spec.scheme, streams=RandomStreams(spec.seed))
    export_trace(trace, spec.trace_path)
    return summarize(trace, wall_time=timer.duration)


class ExperimentRunner:
    """Runs schemes over seeds and sweep points and exports the results"""

    def __init__(self, config: ScenarioConfig, out_dir: Path):
        """Initialize the runner

        Args:
            config: Base scenario; sweeps override its values
            out_dir: Directory receiving traces, summary and the config echo
        """
        self.config = config
        self.out_dir = Path(out_dir)
        logger.info(f"Experiment runner initialized (output: {self.out_dir})")

    def plan(self, schemes: Sequence[str], seeds: Sequence[int],
             sweeps: Sequence[Tuple[str, List[str]]] = ()) -> List[RunSpec]:
        """All runs of the experiment in a fixed order

        Multiple sweeps combine as a cartesian product. Each sweep point gets
        its own subdirectory named ``key=value[,key=value]``.
        """
        if sweeps:
            keys = [key for key, _ in sweeps]
            points = [dict(zip(keys, values)) for values in itertools.product(*(v for _, v in sweeps))]
        else:
            points = [{}]

        specs = []
        for point in points:
            config = self.config.replace(**point) if point else self.config
            label = ",".join(f"{key}={value}" for key, value in point.items())
            directory = self.out_dir / label if label else self.out_dir
            for scheme in schemes:
                for seed in seeds:
                    specs.append(RunSpec(config=config.replace(seed=seed, scheme=scheme),
                                         scheme=scheme, seed=seed, directory=directory, label=label))
        return specs

    def run(self, schemes: Sequence[str], seeds: Sequence[int],
            sweeps: Sequence[Tuple[str, List[str]]] = (), workers: Optional[int] = None) -> List[Dict[str, Any]]:
        """Execute every planned run and write summary.csv and its seed means

        Returns:
            Summary records in plan order

        Raises:
            The first exception of any failed run, after the others finished
        """
        specs = self.plan(schemes, seeds, sweeps)
        workers = workers or self.config.workers
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / CONFIG_ECHO_FILE).write_text(emit_config(self.config), encoding="utf-8", newline="\n")

        logger.info(f"Running {len(specs)} simulations with {workers} worker(s)")
        outcomes = self._execute(specs, workers)

        rows: List[Dict[str, Any]] = []
        failure: Optional[BaseException] = None
        for spec, outcome in zip(specs, outcomes):
            if isinstance(outcome, BaseException):
                logger.error(f"Run {spec.label or 'base'} {spec.scheme} seed {spec.seed} failed: {outcome}")
                failure = failure or outcome
            else:
                rows.append(outcome)

        export_summary(rows, self.out_dir / SUMMARY_FILE)
        if rows:
            export_aggregate(rows, self.out_dir / AGGREGATE_FILE)
        if failure is not None:
            raise failure
        return rows

    def _execute(self, specs: List[RunSpec], workers: int) -> List[Any]:
        if workers <= 1 or len(specs) <= 1:
            return [self._guarded(spec) for spec in specs]

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(execute_run, spec) for spec in specs]
            outcomes = []
            for future in futures:
                try:
                    outcomes.append(future.result())
                except Exception as e:
                    outcomes.append(e)
            return outcomes

    @staticmethod
    def _guarded(spec: RunSpec) -> Any:
        try:
            return execute_run(spec)
        except Exception as e:
            return e
