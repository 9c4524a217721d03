"""
線上定位引擎 - v1.0
✅ 偵測 → 初始候選集合 → 逐步佈署動態感測器 → 更新候選集合
✅ 四種增益：size / drs / rc / random
✅ 雜訊模式的停滯規則（連續兩步未縮小就只在候選源頭中選點）
✅ 被動觀測：不佈署感測器，只收集已佈署感測器的感染
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.constants import LOCALIZATION
from schemas.localization import GainKind, LocalizationConfig, LocalizationResult
from services.candidate_service import (
    CandidateSet,
    Observation,
    consistent_deterministic,
    consistent_noisy,
    detect,
    initialize_candidates,
    update_deterministic,
    update_noisy,
)
from services.epidemic_service import EpidemicTrace
from services.errors import DomainError
from services.gain_service import drs_gains, rc_gains, select_sensor, size_gains
from services.graph_service import DistanceMatrix, Graph
from services.logger import log_step, logger
from services.noisy_gain_service import noisy_size_gains


@dataclass
class LocalizerState:
    """感測器集合、預算與步進時鐘 τ_i = τ0 + iδ"""
    n: int
    static_sensors: Tuple[int, ...]
    budget: Optional[int]
    tau0: float
    delta: float
    epsilon: float
    tolerance_scale: float
    gain: GainKind
    step: int = 0
    dynamic_sensors: List[int] = field(default_factory=list)

    @property
    def tau(self) -> float:
        return self.tau0 + self.step * self.delta

    @property
    def next_tau(self) -> float:
        return self.tau0 + (self.step + 1) * self.delta

    def budget_left(self) -> bool:
        return self.budget is None or len(self.dynamic_sensors) < self.budget

    def candidate_sensors(self) -> List[int]:
        """C_i = V \\ (S ∪ D_{i-1})"""
        used = set(self.static_sensors) | set(self.dynamic_sensors)
        return [v for v in range(self.n) if v not in used]


class Localizer:
    """單次定位的狀態機，不在執行緒之間共用"""

    def __init__(
        self,
        graph: Graph,
        D: DistanceMatrix,
        static_sensors: Sequence[int],
        trace: EpidemicTrace,
        config: LocalizationConfig,
        prior: Optional[np.ndarray] = None,
        run_id: str = "-",
    ):
        if trace.n != graph.n or D.n != graph.n:
            raise DomainError("trace, graph and distance matrix sizes differ")

        self.D = D
        self.trace = trace
        self.config = config
        self.run_id = run_id
        self.rng = np.random.default_rng(config.seed)

        tau0, first, self.log = detect(trace, static_sensors)
        self.candidates: CandidateSet = initialize_candidates(
            D,
            static_sensors,
            first,
            prior,
            epsilon=config.epsilon,
            tolerance_scale=config.tolerance_scale,
        )
        self.state = LocalizerState(
            n=graph.n,
            static_sensors=tuple(sorted(set(int(s) for s in static_sensors))),
            budget=config.k_d,
            tau0=tau0,
            delta=config.delta,
            epsilon=config.epsilon,
            tolerance_scale=config.tolerance_scale,
            gain=config.gain,
        )
        self.history: List[int] = [len(self.candidates)]
        self._stagnant = 0
        log_step(run_id, 0, tau0, len(self.candidates), None, config.gain.value)

    @property
    def anchor(self) -> Tuple[int, float]:
        return self.log.anchor_node, self.log.anchor_time

    @property
    def done(self) -> bool:
        return len(self.candidates) <= 1

    # ==================== 選點 ====================

    def _pool(self) -> List[int]:
        pool = self.state.candidate_sensors()
        if (
            self.config.noisy
            and self.config.gain != GainKind.RANDOM
            and self._stagnant >= LOCALIZATION.STAGNATION_STEPS
        ):
            restricted = [c for c in pool if c in self.candidates]
            if restricted:
                return restricted
        return pool

    def gains(self, pool: Sequence[int]) -> np.ndarray:
        """在 B_{i-1} 上、以下一步的 τ_i 計算每個候選感測器的增益"""
        tau = self.state.next_tau
        kind = self.config.gain
        if kind == GainKind.SIZE:
            if self.config.noisy:
                return noisy_size_gains(
                    pool,
                    self.candidates,
                    self.log,
                    self.config.epsilon,
                    tau,
                    self.D,
                    self.config.tolerance_scale,
                )
            return size_gains(pool, self.candidates, self.anchor, tau, self.D)
        if kind == GainKind.DRS:
            return drs_gains(pool, self.candidates, self.anchor, tau, self.D)
        if kind == GainKind.RC:
            return rc_gains(pool, self.candidates)
        return np.zeros(len(pool))

    def place_next(self) -> int:
        """佈署一個動態感測器並更新候選集合"""
        pool = self._pool()
        if not pool:
            raise DomainError("no candidate sensor left to place")
        sensor = select_sensor(pool, self.gains(pool), self.config.gain, self.rng)
        self.state.dynamic_sensors.append(sensor)
        self._advance(sensor)
        return sensor

    def observe_passively(self) -> None:
        """時鐘前進 δ，不佈署感測器"""
        self._advance(None)

    # ==================== 觀測與更新 ====================

    def _advance(self, placed: Optional[int]) -> None:
        self.state.step += 1
        tau = self.state.tau
        step = self.log.tick(tau)

        batch = []
        if placed is not None:
            batch.append(self._observe(placed, step, tau))
        for obs in self.log.open_negatives():
            if obs.node != placed and self.trace.is_infected(obs.node, tau):
                batch.append(self._observe(obs.node, step, tau))
        batch.sort(key=lambda obs: obs.node)
        for obs in batch:
            self.log.record(obs)

        before = len(self.candidates)
        if self.config.noisy:
            self.candidates = update_noisy(
                self.candidates,
                self.log,
                self.config.epsilon,
                self.config.tolerance_scale,
                tau,
                self.D,
            )
        else:
            applied = batch
            if self.config.refresh_negatives:
                applied = [obs for obs in batch if obs.positive] + self.log.open_negatives()
            self.candidates = update_deterministic(self.candidates, applied, self.anchor, tau, self.D)

        self._stagnant = 0 if len(self.candidates) < before else self._stagnant + 1
        self.history.append(len(self.candidates))
        log_step(self.run_id, step, tau, len(self.candidates), placed, self.config.gain.value)

    def _observe(self, node: int, step: int, tau: float) -> Observation:
        if self.trace.is_infected(node, tau):
            return Observation(node=node, time=float(self.trace.infection_time[node]), step=step, tau=tau)
        return Observation(node=node, time=None, step=step, tau=tau)

    # ==================== 主迴圈 ====================

    def run(self) -> LocalizationResult:
        while not self.done and self.state.budget_left():
            if not self.state.candidate_sensors():
                # 所有節點都已是感測器：等到每個感測器都被感染
                while not self.done and self.log.open_negatives():
                    self.observe_passively()
                break
            self.place_next()
        return self.result()

    def result(self) -> LocalizationResult:
        final = list(self.candidates.members)
        return LocalizationResult(
            final_candidates=final,
            static_sensors=list(self.state.static_sensors),
            sensor_sequence=list(self.state.dynamic_sensors),
            sensors_used=len(self.state.static_sensors) + len(self.state.dynamic_sensors),
            steps=self.state.step,
            start_time=self.state.tau0,
            localization_time=self.state.tau,
            localized=final == [self.trace.source],
            history=list(self.history),
        )


def run_localization(
    graph: Graph,
    D: DistanceMatrix,
    static_sensors: Sequence[int],
    trace: EpidemicTrace,
    config: LocalizationConfig,
    prior: Optional[np.ndarray] = None,
    run_id: str = "-",
) -> LocalizationResult:
    """線上佈署與定位：B 只剩一個或預算用完時停止"""
    try:
        result = Localizer(graph, D, static_sensors, trace, config, prior, run_id).run()
    except Exception as e:
        logger.error(f"定位失敗 run={run_id}: {str(e)}")
        raise
    logger.debug(
        f"定位完成 run={run_id}: |B|={len(result.final_candidates)} "
        f"|D|={result.dynamic_count} tau={result.localization_time:g}"
    )
    return result


def oracle_candidates(localizer: Localizer) -> List[int]:
    """以暴力一致性檢查重算候選集合，用於驗證增量更新"""
    config = localizer.config
    prior = localizer.candidates.prior
    members = []
    for v in range(localizer.D.n):
        if config.noisy:
            ok = consistent_noisy(
                v,
                localizer.log,
                config.epsilon,
                config.tolerance_scale,
                localizer.D,
                static_sensors=localizer.state.static_sensors,
                prior=prior,
            )
        else:
            ok = consistent_deterministic(
                v,
                localizer.log,
                localizer.D,
                prior=prior,
                refresh_negatives=config.refresh_negatives,
            )
        if ok:
            members.append(v)
    return members
