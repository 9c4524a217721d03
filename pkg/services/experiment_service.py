"""
實驗執行服務 - v1.0
✅ 靜態感測器佈署（k-DRS）
✅ 單一試驗：均勻抽源頭、t*=0、抽延遲、定位、計算指標
✅ AllStatic 基準線（同一條疫情軌跡，成對比較）
✅ 批次實驗（執行緒平行，輸出順序固定）與彙總
✅ 候選集合大小曲線（|B_i| 對步數）
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.constants import EXPERIMENT, default_sensor_budget
from config.settings import get_max_workers
from repository.graph_repository import GraphRepository
from schemas.experiment import ExperimentConfig, GraphSourceConfig, MetricsRecord
from schemas.localization import GainKind, LocalizationConfig, LocalizationResult
from services.epidemic_service import EpidemicTrace, simulate
from services.errors import ConfigError, SourceLocError, TrialError
from services.graph_service import (
    DistanceMatrix,
    Graph,
    all_pairs_shortest_paths,
    build_generator_spec,
    generate,
)
from services.localization_service import run_localization
from services.logger import log_trial, logger
from services.resolving_service import greedy_k_drs
from utils.seeds import derive_seed

ALLSTATIC = "allstatic"


# ==================== 單一試驗 ====================

def place_static(graph: Graph, D: DistanceMatrix, k_s: int, max_workers: Optional[int] = None) -> Tuple[int, ...]:
    """S = k-DRS，k = K_s"""
    if k_s < EXPERIMENT.MIN_STATIC_SENSORS:
        raise ConfigError(f"K_s must be >= {EXPERIMENT.MIN_STATIC_SENSORS}, got {k_s}")
    if k_s > graph.n:
        raise ConfigError(f"K_s={k_s} exceeds N={graph.n}")
    return greedy_k_drs(D, k_s, max_workers=max_workers)


def metrics_from_result(
    result: LocalizationResult,
    trace: EpidemicTrace,
    context: Dict,
) -> MetricsRecord:
    n = trace.n
    tau = result.localization_time
    return MetricsRecord(
        cost=result.sensors_used / n,
        success=1.0 / len(result.final_candidates),
        localized=result.localized,
        T=tau - trace.start_time,
        mu=trace.fraction_infected(tau),
        dynamic_count=result.dynamic_count,
        history=result.history,
        **context,
    )


def _trial_trace(graph: Graph, epsilon: float, trial_seed: int) -> EpidemicTrace:
    source_rng = np.random.default_rng(derive_seed(trial_seed, "source"))
    source = int(source_rng.integers(graph.n))
    return simulate(graph, source, epsilon, derive_seed(trial_seed, "delays"), start_time=0.0)


def run_trial(
    graph: Graph,
    D: DistanceMatrix,
    static_set: Sequence[int],
    config: LocalizationConfig,
    trial_seed: int,
    trace: Optional[EpidemicTrace] = None,
    context: Optional[Dict] = None,
) -> MetricsRecord:
    """均勻抽源頭、t*=0、抽延遲（或沿用給定的軌跡），執行定位並計算指標"""
    if trace is None:
        trace = _trial_trace(graph, config.epsilon, trial_seed)
    context = context or _default_context(graph, config, config.gain.value)
    try:
        result = run_localization(graph, D, static_set, trace, config, run_id=str(trial_seed))
    except SourceLocError as e:
        raise TrialError(
            str(e),
            instance=context.get("graph"),
            trial=context.get("trial"),
            gain=config.gain.value,
            seed=trial_seed,
        ) from e
    return metrics_from_result(result, trace, context)


def run_baseline_allstatic(
    graph: Graph,
    D: DistanceMatrix,
    k_s_prime: int,
    trace: EpidemicTrace,
    static_set: Optional[Sequence[int]] = None,
    delta: float = 1.0,
    epsilon: float = 0.0,
    tolerance_scale: float = 1.0,
    context: Optional[Dict] = None,
) -> MetricsRecord:
    """整個預算都給靜態感測器（K'_d = 0）：只在偵測時刻計算 B_0"""
    if static_set is None:
        static_set = place_static(graph, D, k_s_prime)
    config = LocalizationConfig(
        gain=GainKind.SIZE,
        k_d=0,
        delta=delta,
        epsilon=epsilon,
        tolerance_scale=tolerance_scale,
    )
    context = context or _default_context(graph, config, ALLSTATIC)
    try:
        result = run_localization(graph, D, static_set, trace, config, run_id=ALLSTATIC)
    except SourceLocError as e:
        raise TrialError(str(e), instance=context.get("graph"), trial=context.get("trial"), gain=ALLSTATIC) from e
    return metrics_from_result(result, trace, context)


def _default_context(graph: Graph, config: LocalizationConfig, gain: str) -> Dict:
    return {
        "graph": "graph",
        "model": "file",
        "n": graph.n,
        "eps": config.epsilon,
        "delta": config.delta,
        "gain": gain,
        "trial": 0,
    }


# ==================== 批次實驗 ====================

@dataclass(frozen=True)
class GraphInstance:
    """一個圖實例與它的距離矩陣、靜態感測器"""
    name: str
    model: str
    index: int
    graph: Graph
    D: DistanceMatrix
    static: Tuple[int, ...]
    allstatic: Optional[Tuple[int, ...]]
    k_d: Optional[int]


def load_graph_source(source: GraphSourceConfig, instance: int, master_seed: int, graph_index: int) -> Graph:
    """產生器實例的種子：固定 seed + instance，否則由 master_seed 推導"""
    if source.path is not None:
        return GraphRepository().load(source.path)
    seed = (
        source.seed + instance
        if source.seed is not None
        else derive_seed(master_seed, "graph", graph_index, instance)
    )
    spec = build_generator_spec(
        model=source.model,
        n=source.n,
        seed=seed,
        p=source.p,
        m=source.m,
        radius=source.radius,
        degree=source.degree,
    )
    return generate(spec)


def _guarded(run, context: Dict) -> MetricsRecord:
    """單一列失敗時記錄錯誤並繼續"""
    run_id = f"{context['graph']}/{context['gain']}/eps={context['eps']}/delta={context['delta']}/trial={context['trial']}"
    try:
        record = run()
    except SourceLocError as e:
        log_trial(run_id, False, error=str(e))
        return MetricsRecord.failed(str(e), **context)
    log_trial(
        run_id,
        True,
        cost=record.cost,
        success_rate=record.success,
        T=record.T,
        dynamic=record.dynamic_count,
    )
    return record


class ExperimentService:
    """批次實驗：準備圖實例、平行執行試驗、收集每列指標與候選集合大小曲線"""

    def __init__(self, config: ExperimentConfig, max_workers: Optional[int] = None):
        self.config = config
        self.workers = max_workers or config.max_workers or get_max_workers()
        self.records: List[MetricsRecord] = []

    def prepare_instances(self) -> List[GraphInstance]:
        config = self.config
        instances = []
        for graph_index, source in enumerate(config.graphs):
            count = 1 if source.path is not None else source.instances
            for instance in range(count):
                graph = load_graph_source(source, instance, config.master_seed, graph_index)
                D = all_pairs_shortest_paths(graph)
                n = graph.n
                k_s = config.k_s if config.k_s is not None else max(
                    EXPERIMENT.MIN_STATIC_SENSORS, default_sensor_budget(n)
                )
                if config.k_d == "inf":
                    k_d = None
                elif config.k_d is None:
                    k_d = default_sensor_budget(n)
                else:
                    k_d = config.k_d
                static = place_static(graph, D, k_s, self.workers)

                allstatic = None
                if ALLSTATIC in config.baselines:
                    if k_d is None:
                        logger.warning("AllStatic 需要有限的 K_d，略過此基準線")
                    else:
                        allstatic = greedy_k_drs(D, min(n, k_s + k_d), max_workers=self.workers)

                instances.append(GraphInstance(
                    name=source.display_name(),
                    model=source.model or "file",
                    index=instance,
                    graph=graph,
                    D=D,
                    static=static,
                    allstatic=allstatic,
                    k_d=k_d,
                ))
                logger.info(f"實例 {source.display_name()}#{instance}: N={n} K_s={k_s} K_d={k_d}")
        return instances

    def instance_trials(self, inst: GraphInstance, trial: int) -> List[MetricsRecord]:
        """一個 (實例, 試驗)：同一個源頭跑所有 ε，同一條軌跡跑所有 δ / 增益 / AllStatic"""
        config = self.config
        trial_seed = derive_seed(config.master_seed, inst.name, inst.index, trial)
        rows = []
        for eps in config.epsilons:
            base = {
                "graph": f"{inst.name}#{inst.index}",
                "model": inst.model,
                "n": inst.graph.n,
                "eps": eps,
                "trial": trial,
            }
            trace = _trial_trace(inst.graph, eps, trial_seed)

            for delta in config.deltas:
                for gain in config.all_gains():
                    context = {**base, "delta": delta, "gain": gain.value}
                    loc_config = LocalizationConfig(
                        gain=gain,
                        k_d=inst.k_d,
                        delta=delta,
                        epsilon=eps,
                        tolerance_scale=config.tolerance_scale,
                        seed=derive_seed(trial_seed, "gain", gain.value, eps, delta),
                        refresh_negatives=config.refresh_negatives,
                    )
                    rows.append(_guarded(
                        lambda: run_trial(inst.graph, inst.D, inst.static, loc_config, trial_seed, trace, context),
                        context,
                    ))
                if inst.allstatic is not None:
                    context = {**base, "delta": delta, "gain": ALLSTATIC}
                    rows.append(_guarded(
                        lambda: run_baseline_allstatic(
                            inst.graph,
                            inst.D,
                            len(inst.allstatic),
                            trace,
                            static_set=inst.allstatic,
                            delta=delta,
                            epsilon=eps,
                            tolerance_scale=config.tolerance_scale,
                            context=context,
                        ),
                        context,
                    ))
        return rows

    def run(self) -> pd.DataFrame:
        """每個試驗一列，欄位固定；執行緒平行但輸出順序與排程無關"""
        try:
            instances = self.prepare_instances()
        except SourceLocError as e:
            logger.error(f"準備圖實例失敗: {str(e)}")
            raise
        tasks = [(inst, trial) for inst in instances for trial in range(self.config.trials)]
        logger.info(f"開始實驗: {len(instances)} 個實例 x {self.config.trials} 次試驗, workers={self.workers}")

        def work(task):
            inst, trial = task
            return self.instance_trials(inst, trial)

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                batches = list(executor.map(work, tasks))
        else:
            batches = [work(task) for task in tasks]

        self.records = [record for batch in batches for record in batch]
        frame = pd.DataFrame([record.to_row() for record in self.records], columns=EXPERIMENT.CSV_COLUMNS)
        failures = int(frame["error"].notna().sum())
        if failures:
            logger.warning(f"實驗完成，{failures} 列失敗")
        else:
            logger.info(f"實驗完成: {len(frame)} 列")
        return frame

    def history_frame(self) -> pd.DataFrame:
        """|B_i| 對步數 i 的長表，每個 (列, 步) 一列"""
        rows = [
            {
                "graph": record.graph,
                "eps": record.eps,
                "delta": record.delta,
                "gain": record.gain,
                "trial": record.trial,
                "step": step,
                "candidates": size,
            }
            for record in self.records
            for step, size in enumerate(record.history)
        ]
        return pd.DataFrame(rows, columns=EXPERIMENT.HISTORY_COLUMNS)


def run_experiment(config: ExperimentConfig, max_workers: Optional[int] = None) -> pd.DataFrame:
    return ExperimentService(config, max_workers).run()


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """每個 (graph class, gain, ε, δ) 一列：每個指標的平均與標準誤"""
    keys = ["graph", "model", "n", "eps", "delta", "gain"]
    rows = rows.assign(graph=rows["graph"].astype(str).str.split("#").str[0])
    ok = rows[rows["error"].isna()].copy()
    metrics = EXPERIMENT.SUMMARY_METRICS
    for column in metrics:
        ok[column] = pd.to_numeric(ok[column].astype(float), errors="coerce")

    grouped = ok.groupby(keys, sort=True)
    summary = grouped[metrics].agg(["mean", "sem"])
    summary.columns = [f"{metric}_{'se' if stat == 'sem' else stat}" for metric, stat in summary.columns]
    summary["trials"] = grouped.size()

    failures = rows.assign(failed=rows["error"].notna()).groupby(keys, sort=True)["failed"].sum()
    summary = summary.join(failures.rename("failures").astype(int), how="right")
    summary["trials"] = summary["trials"].fillna(0).astype(int)
    return summary.reset_index()
