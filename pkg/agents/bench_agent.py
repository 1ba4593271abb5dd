"""
Benchmark harness: runs the solver pipeline over instances x parameter grids
and collects one BenchRecord per run into a pandas DataFrame.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator
from tqdm import tqdm

from agents.planner_agent import STANDARD
from apis.file_formats import read_instance
from main import create_and_run_solver
from models.errors import InputError
from models.instance import Instance, Objective
from models.params import SolveParams, WeightVariant
from models.reports import BenchRecord
from utils.generators import generate_instance
from utils.helpers import DEFAULT_HOPS, DEFAULT_PEN, HISTOGRAM_BIN, worker_count

logger = logging.getLogger(__name__)

ALPHA_SWEEP_PENS = (10.0, 30.0, 90.0, 270.0)
SIGMA_SWEEP_SIGMAS = (0.0, 0.2, 0.4, 0.6, 0.8)

Hood = Optional[Union[int, Literal["inf"]]]


class InstanceSpec(BaseModel):
    """Either a file path or a generated instance."""

    path: Optional[str] = None
    n: Optional[int] = Field(None, ge=3)
    distribution: str = "uniform"
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _one_source(self) -> "InstanceSpec":
        if (self.path is None) == (self.n is None):
            raise ValueError("give exactly one of 'path' or 'n'")
        return self

    def load(self) -> Instance:
        if self.path is not None:
            return read_instance(self.path)
        return generate_instance(self.n, self.distribution, self.seed)


class BenchConfig(BaseModel):
    experiment: Literal["grid", "alpha-sweep", "sigma-sweep", "scaling"] = "grid"
    instances: List[InstanceSpec] = Field(min_length=1)
    objectives: List[Objective] = [Objective.MAX]
    pens: List[float] = [DEFAULT_PEN]
    hops: List[int] = [DEFAULT_HOPS]
    hoods: List[Hood] = [None]
    sigmas: List[float] = [0.0]
    weight_variants: List[WeightVariant] = [WeightVariant.MINUS]
    seeds: List[int] = [0]
    workers: Optional[int] = None

    def parameter_grid(self) -> List[SolveParams]:
        pens, variants, sigmas = self.pens, self.weight_variants, self.sigmas
        if self.experiment == "alpha-sweep":
            pens, variants = list(ALPHA_SWEEP_PENS), list(WeightVariant)
        elif self.experiment == "sigma-sweep" and sigmas == [0.0]:
            sigmas = list(SIGMA_SWEEP_SIGMAS)
        grid = itertools.product(self.objectives, pens, variants, self.hops, self.hoods, sigmas, self.seeds)
        return [
            SolveParams(objective=obj, pen=pen, weight_variant=variant, hops=hops, hood=hood, sigma=sigma, seed=seed)
            for obj, pen, variant, hops, hood, sigma, seed in grid
        ]


def load_config(path: Union[str, Path]) -> BenchConfig:
    try:
        return BenchConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except ValidationError as exc:
        raise InputError(f"invalid bench config {path}: {exc}") from exc


def run_job(experiment: str, instance: Instance, params: SolveParams) -> BenchRecord:
    """One pipeline run; any failure is recorded in the ``error`` field."""
    record = dict(
        experiment=experiment,
        instance=instance.name,
        n=instance.n,
        objective=params.objective.value,
        pen=params.pen,
        hops=params.hops,
        hood=str(params.hood if params.hood is not None else "auto"),
        sigma=params.sigma,
        weight_variant=params.weight_variant.value,
        seed=params.seed,
    )
    try:
        state = create_and_run_solver(instance, params, strategy=STANDARD)
    except Exception as exc:
        return BenchRecord(**record, error=f"{type(exc).__name__}: {exc}")
    timings = state.get("timings", {})
    failure = state.get("failure")
    report = state.get("report")
    return BenchRecord(
        **record,
        greedy_seconds=timings.get("greedy", 0.0),
        local_search_seconds=timings.get("local_search", 0.0),
        total_seconds=sum(timings.values()),
        greedy_score=state.get("greedy_score"),
        final_score=report.score if report is not None else None,
        error=None if failure is None else f"{type(failure).__name__}: {failure}",
    )


def pool_size(config: BenchConfig, jobs: int) -> int:
    """Worker threads for a bench run; scaling runs are timed one at a time."""
    if config.experiment == "scaling":
        if config.workers not in (None, 1):
            logger.warning("[Bench] scaling runs are timed sequentially; ignoring workers=%d", config.workers)
        return 1
    return worker_count(config.workers, jobs)


def run_bench(config: BenchConfig, progress: bool = True) -> pd.DataFrame:
    instances = [spec.load() for spec in config.instances]
    jobs: List[Tuple[Instance, SolveParams]] = [(inst, p) for inst in instances for p in config.parameter_grid()]
    logger.info("[Bench] %s: %d run(s) over %d instance(s)", config.experiment, len(jobs), len(instances))
    records: Dict[int, BenchRecord] = {}
    workers = pool_size(config, len(jobs))
    if workers == 1:
        for k, (inst, p) in enumerate(tqdm(jobs, disable=not progress, desc=config.experiment)):
            records[k] = run_job(config.experiment, inst, p)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_job, config.experiment, inst, p): k for k, (inst, p) in enumerate(jobs)}
            for future in tqdm(as_completed(futures), total=len(futures), disable=not progress, desc=config.experiment):
                records[futures[future]] = future.result()
    frame = pd.DataFrame([records[k].model_dump() for k in range(len(jobs))])
    failed = int(frame["error"].notna().sum())
    if failed:
        logger.warning("[Bench] %d of %d run(s) failed", failed, len(jobs))
    return frame


def alpha_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean scores before and after local search per (objective, pen, weight variant)."""
    ok = frame[frame["error"].isna()]
    return (ok.groupby(["objective", "pen", "weight_variant"], as_index=False)[["greedy_score", "final_score"]]
            .mean())


def sigma_histogram(frame: pd.DataFrame, bin_width: float = HISTOGRAM_BIN) -> pd.DataFrame:
    """Final scores floored to multiples of ``bin_width``, counted per sigma."""
    ok = frame[frame["error"].isna()].copy()
    ok["bin"] = np.round(np.floor(ok["final_score"].to_numpy() / bin_width + 1e-9) * bin_width, 6)
    return ok.groupby(["sigma", "bin"]).size().reset_index(name="count")


def scaling_slope(frame: pd.DataFrame, column: str = "greedy_seconds") -> float:
    """Slope of log(time) against log(n), over the mean time per n."""
    ok = frame[frame["error"].isna() & (frame[column] > 0)]
    means = ok.groupby("n")[column].mean()
    if len(means) < 2:
        raise ValueError("need timings for at least two sizes")
    return float(np.polyfit(np.log(means.index.to_numpy(dtype=float)), np.log(means.to_numpy()), 1)[0])


def summarize(config: BenchConfig, frame: pd.DataFrame) -> pd.DataFrame:
    if config.experiment == "alpha-sweep":
        return alpha_table(frame)
    if config.experiment == "sigma-sweep":
        return sigma_histogram(frame)
    if config.experiment == "scaling":
        slope = scaling_slope(frame)
        logger.info("[Bench] greedy time grows like n^%.2f", slope)
        return pd.DataFrame([{"column": "greedy_seconds", "loglog_slope": slope}])
    return frame
