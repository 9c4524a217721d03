"""
候選源頭服務 - v1.0
✅ 觀測紀錄（正向 / 負向觀測、錨點 (s0, τ0)）
✅ 偵測：第一批被感染的靜態感測器
✅ 初始候選集合（確定性 / 有界雜訊）
✅ 候選集合更新（錨點等式、成對不等式）
✅ 暴力一致性檢查（驗證用）
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.constants import TOLERANCE
from services.epidemic_service import EpidemicTrace
from services.errors import DegenerateEvidenceError, DomainError
from services.graph_service import DistanceMatrix
from services.logger import logger


# ==================== 觀測 ====================

@dataclass(frozen=True)
class Observation:
    """感測器觀測：time=None 表示負向（尚未感染），tau 為記錄當下的時鐘"""
    node: int
    time: Optional[float]
    step: int
    tau: float

    @property
    def positive(self) -> bool:
        return self.time is not None


@dataclass
class ObservationLog:
    """依序累積的觀測 O_i；clock[k] 為第 k 步的 τ_k"""
    anchor_node: int
    anchor_time: float
    observations: List[Observation] = field(default_factory=list)
    clock: List[float] = field(default_factory=list)

    def record(self, obs: Observation) -> None:
        if self.observations and obs.step < self.observations[-1].step:
            raise DomainError("observation steps must be non-decreasing")
        current = self.state(obs.node)
        if current is not None and current.positive:
            raise DomainError(f"node {obs.node} already has a positive observation")
        if obs.positive and obs.time > obs.tau + TOLERANCE.TIME_TOL:
            raise DomainError(f"positive observation of {obs.node} after its recording time")
        self.observations.append(obs)

    def tick(self, tau: float) -> int:
        """開始新的一步，回傳步數"""
        self.clock.append(tau)
        return len(self.clock) - 1

    @property
    def step(self) -> int:
        return len(self.clock) - 1

    @property
    def tau(self) -> float:
        return self.clock[-1]

    def state(self, node: int) -> Optional[Observation]:
        """節點最新的觀測"""
        latest = None
        for obs in self.observations:
            if obs.node == node:
                latest = obs
        return latest

    def positives(self, up_to_step: Optional[int] = None) -> List[Observation]:
        return [
            obs for obs in self.observations
            if obs.positive and (up_to_step is None or obs.step <= up_to_step)
        ]

    def open_negatives(self, up_to_step: Optional[int] = None) -> List[Observation]:
        """尚未被正向觀測取代的負向觀測（每個節點最早的一筆）"""
        infected = {obs.node for obs in self.positives(up_to_step)}
        negatives: Dict[int, Observation] = {}
        for obs in self.observations:
            if up_to_step is not None and obs.step > up_to_step:
                break
            if not obs.positive and obs.node not in infected and obs.node not in negatives:
                negatives[obs.node] = obs
        return sorted(negatives.values(), key=lambda obs: obs.node)

    def negatives_recorded_at(self, step: int) -> List[Observation]:
        return [obs for obs in self.observations if obs.step == step and not obs.positive]

    def sensors(self) -> List[int]:
        return sorted({obs.node for obs in self.observations})


@dataclass(frozen=True)
class CandidateSet:
    """候選源頭 B 與先驗 π（長度 N，總和為 1）"""
    members: Tuple[int, ...]
    prior: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return int(v) in self.members

    @property
    def index(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)

    def weights(self) -> np.ndarray:
        """π 在 B 上重新正規化"""
        mass = self.prior[self.index]
        total = mass.sum()
        if total <= 0:
            return np.full(len(self.members), 1.0 / max(len(self.members), 1))
        return mass / total

    def restrict(self, keep: np.ndarray) -> "CandidateSet":
        members = tuple(int(v) for v, k in zip(self.members, keep) if k)
        return CandidateSet(members=members, prior=self.prior)


def uniform_prior(n: int) -> np.ndarray:
    prior = np.full(n, 1.0 / n)
    prior.setflags(write=False)
    return prior


def _require_nonempty(candidates: CandidateSet, context: str) -> CandidateSet:
    if len(candidates) == 0:
        logger.error(f"候選集合為空: {context}")
        raise DegenerateEvidenceError(f"empty candidate set after {context}")
    return candidates


# ==================== 偵測與初始化 ====================

def detect(trace: EpidemicTrace, static_sensors: Sequence[int]) -> Tuple[float, List[int], ObservationLog]:
    """τ0 = 靜態感測器中最早的感染時間；S0 = 同時在 τ0 感染的感測器"""
    sensors = sorted(set(int(s) for s in static_sensors))
    if not sensors:
        raise DomainError("at least one static sensor is required")

    times = trace.infection_time[sensors]
    tau0 = float(times.min())
    first = [s for s, t in zip(sensors, times) if abs(t - tau0) <= TOLERANCE.TIME_TOL]

    log = ObservationLog(anchor_node=first[0], anchor_time=tau0)
    log.tick(tau0)
    for s in sensors:
        time = tau0 if s in first else None
        log.record(Observation(node=s, time=time, step=0, tau=tau0))
    return tau0, first, log


def initialize_candidates(
    D: DistanceMatrix,
    static_sensors: Sequence[int],
    first_sensors: Sequence[int],
    prior: Optional[np.ndarray] = None,
    epsilon: float = 0.0,
    tolerance_scale: float = 1.0,
) -> CandidateSet:
    """B_0：確定性模式下 S_0^v = S_0；雜訊模式下 d(s0,v) - min_s d(v,s) <= ε̃(d(s0,v) + min_s d(v,s))"""
    sensors = sorted(set(int(s) for s in static_sensors))
    first = sorted(set(int(s) for s in first_sensors))
    if not first or not set(first) <= set(sensors):
        raise DomainError("S_0 must be a non-empty subset of the static sensors")
    prior = uniform_prior(D.n) if prior is None else np.asarray(prior, dtype=float)

    support = np.flatnonzero(prior > 0)
    dist = D.d[np.ix_(support, sensors)]
    nearest = dist.min(axis=1)

    if epsilon == 0:
        at_min = np.abs(dist - nearest[:, None]) <= TOLERANCE.TIME_TOL
        expected = np.isin(sensors, first)
        keep = (at_min == expected).all(axis=1)
        candidates = CandidateSet(tuple(int(v) for v in support[keep]), prior)
    else:
        eps = tolerance_scale * epsilon
        to_first = D.d[np.ix_(support, first)]
        keep = (
            to_first - nearest[:, None]
            <= eps * (to_first + nearest[:, None]) + TOLERANCE.TIME_TOL
        ).all(axis=1)
        candidates = CandidateSet(tuple(int(v) for v in support[keep]), prior)
        negatives = [
            Observation(node=s, time=None, step=0, tau=0.0) for s in sensors if s not in first
        ]
        positives = [Observation(node=s, time=0.0, step=0, tau=0.0) for s in first]
        keep = noisy_consistency_mask(candidates, positives, negatives, eps, 0.0, D)
        candidates = candidates.restrict(keep)

    return _require_nonempty(candidates, "initialization")


# ==================== 更新 ====================

def update_deterministic(
    candidates: CandidateSet,
    new_observations: Iterable[Observation],
    anchor: Tuple[int, float],
    tau_i: float,
    D: DistanceMatrix,
) -> CandidateSet:
    """正向：d(u,v) - d(s0,v) = t - τ0；負向：d(u,v) - d(s0,v) > τ_i - τ0"""
    s0, tau0 = anchor
    members = candidates.index
    keep = np.ones(len(members), dtype=bool)
    to_anchor = D.d[s0, members]

    for obs in new_observations:
        diff = D.d[obs.node, members] - to_anchor
        if obs.positive:
            keep &= np.abs(diff - (obs.time - tau0)) <= TOLERANCE.TIME_TOL
        else:
            keep &= diff > tau_i - tau0

    return _require_nonempty(candidates.restrict(keep), f"deterministic update at tau={tau_i:g}")


def noisy_consistency_mask(
    candidates: CandidateSet,
    positives: Sequence[Observation],
    negatives: Sequence[Observation],
    eps: float,
    tau_i: float,
    D: DistanceMatrix,
) -> np.ndarray:
    """成對檢查：正向×正向 |d2-d1-t2+t1| <= ε̃(d1+d2)，正向×負向 τ_i-t1-d2+d1 < ε̃(d1+d2)"""
    members = candidates.index
    keep = np.ones(len(members), dtype=bool)
    if not positives or not len(members):
        return keep

    pos_nodes = [obs.node for obs in positives]
    pos_times = np.array([obs.time for obs in positives], dtype=float)
    dp = D.d[np.ix_(pos_nodes, members)]

    if len(positives) > 1:
        lhs = np.abs(dp[None, :, :] - dp[:, None, :] - pos_times[None, :, None] + pos_times[:, None, None])
        rhs = eps * (dp[None, :, :] + dp[:, None, :])
        keep &= (lhs <= rhs + TOLERANCE.TIME_TOL).all(axis=(0, 1))

    if negatives:
        dn = D.d[np.ix_([obs.node for obs in negatives], members)]
        lhs = tau_i - pos_times[:, None, None] - dn[None, :, :] + dp[:, None, :]
        rhs = eps * (dp[:, None, :] + dn[None, :, :])
        keep &= (lhs < rhs + TOLERANCE.TIME_TOL).all(axis=(0, 1))

    return keep


def update_noisy(
    candidates: CandidateSet,
    log: ObservationLog,
    epsilon: float,
    tolerance_scale: float,
    tau_i: float,
    D: DistanceMatrix,
) -> CandidateSet:
    """以目前的 τ_i 對整份觀測紀錄做成對檢查，再與輸入集合取交集"""
    keep = noisy_consistency_mask(
        candidates,
        log.positives(),
        log.open_negatives(),
        tolerance_scale * epsilon,
        tau_i,
        D,
    )
    return _require_nonempty(candidates.restrict(keep), f"noisy update at tau={tau_i:g}")


# ==================== 暴力一致性檢查 ====================

def consistent_deterministic(
    v: int,
    log: ObservationLog,
    D: DistanceMatrix,
    prior: Optional[np.ndarray] = None,
    refresh_negatives: bool = False,
) -> bool:
    """v 作為源頭時，所有觀測兩兩之間是否一致（不經由錨點）"""
    if prior is not None and prior[v] <= 0:
        return False
    dv = D.d[v]
    positives = log.positives()

    for i, first in enumerate(positives):
        for second in positives[i + 1:]:
            lhs = dv[second.node] - dv[first.node]
            if abs(lhs - (second.time - first.time)) > TOLERANCE.TIME_TOL:
                return False

    for step, tau in enumerate(log.clock):
        if refresh_negatives:
            negatives = log.open_negatives(up_to_step=step)
        else:
            negatives = log.negatives_recorded_at(step)
        for negative in negatives:
            for pos in positives:
                if not dv[negative.node] - dv[pos.node] > tau - pos.time:
                    return False
    return True


def consistent_noisy(
    v: int,
    log: ObservationLog,
    epsilon: float,
    tolerance_scale: float,
    D: DistanceMatrix,
    static_sensors: Optional[Sequence[int]] = None,
    prior: Optional[np.ndarray] = None,
) -> bool:
    """逐步重播：每一步的正向觀測兩兩檢查、正向×尚未感染的負向以該步的 τ 檢查"""
    if prior is not None and prior[v] <= 0:
        return False
    eps = tolerance_scale * epsilon
    dv = D.d[v]

    if static_sensors:
        nearest = min(dv[s] for s in static_sensors)
        for first in log.positives(up_to_step=0):
            d0 = dv[first.node]
            if d0 - nearest > eps * (d0 + nearest) + TOLERANCE.TIME_TOL:
                return False

    for step, tau in enumerate(log.clock):
        positives = log.positives(up_to_step=step)
        for a in positives:
            for b in positives:
                lhs = abs(dv[b.node] - dv[a.node] - b.time + a.time)
                if lhs > eps * (dv[a.node] + dv[b.node]) + TOLERANCE.TIME_TOL:
                    return False
            for negative in log.open_negatives(up_to_step=step):
                lhs = tau - a.time - dv[negative.node] + dv[a.node]
                if not lhs < eps * (dv[a.node] + dv[negative.node]) + TOLERANCE.TIME_TOL:
                    return False
    return True
