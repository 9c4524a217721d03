"""
增益函數服務 - v1.0
✅ 可能的感染時間 T_i^c（依預測時間分組）
✅ Size-Gain：候選集合的期望縮減量
✅ DRS-Gain：|T_i^c| + X_c
✅ RC-Gain / RANDOM
✅ argmax 選點（平手取最小編號，RC 平手隨機）
"""

from typing import List, Sequence, Tuple

import numpy as np

from config.constants import TOLERANCE
from schemas.localization import GainKind
from services.candidate_service import CandidateSet
from services.graph_service import DistanceMatrix

_LATE = np.iinfo(np.int64).max


def predicted_times(
    pool: Sequence[int],
    candidates: CandidateSet,
    anchor: Tuple[int, float],
    D: DistanceMatrix,
) -> np.ndarray:
    """h(v, c) = d(v,c) - d(v,s0) + τ0，列為候選源頭 v、欄為候選感測器 c"""
    s0, tau0 = anchor
    members = candidates.index
    return D.d[np.ix_(members, list(pool))] - D.d[members, s0][:, None] + tau0


def _time_keys(times: np.ndarray, tau_i: float) -> np.ndarray:
    """預測時間量化成整數鍵；晚於 τ_i 的全部併成同一組"""
    keys = np.rint(times / TOLERANCE.TIME_TOL).astype(np.int64)
    keys[times > tau_i + TOLERANCE.TIME_TOL] = _LATE
    return keys


def possible_infection_times(
    candidate_sensor: int,
    candidates: CandidateSet,
    anchor: Tuple[int, float],
    tau_i: float,
    D: DistanceMatrix,
) -> List[float]:
    times = predicted_times([candidate_sensor], candidates, anchor, D)[:, 0]
    keys = _time_keys(times, tau_i)
    groups = {}
    for key, t in zip(keys.tolist(), times.tolist()):
        if key != _LATE:
            groups.setdefault(key, t)
    return sorted(groups.values())


def size_gains(
    pool: Sequence[int],
    candidates: CandidateSet,
    anchor: Tuple[int, float],
    tau_i: float,
    D: DistanceMatrix,
) -> np.ndarray:
    """Σ_g π(g)/π(B)·(|B| - |g|)，g 為同一預測時間（或同為晚到）的候選源頭"""
    if len(candidates) <= 1:
        return np.zeros(len(pool))
    keys = _time_keys(predicted_times(pool, candidates, anchor, D), tau_i)
    weights = candidates.weights()
    size = len(candidates)

    gains = np.empty(len(pool))
    for j in range(len(pool)):
        _, inverse, counts = np.unique(keys[:, j], return_inverse=True, return_counts=True)
        group_size = counts[inverse.reshape(-1)]
        gains[j] = size - float(np.dot(weights, group_size))
    return gains


def drs_gains(
    pool: Sequence[int],
    candidates: CandidateSet,
    anchor: Tuple[int, float],
    tau_i: float,
    D: DistanceMatrix,
) -> np.ndarray:
    """準時的相異預測時間數 + 是否有人晚到"""
    keys = _time_keys(predicted_times(pool, candidates, anchor, D), tau_i)
    gains = np.empty(len(pool))
    for j in range(len(pool)):
        column = keys[:, j]
        late = column == _LATE
        gains[j] = len(np.unique(column[~late])) + float(late.any())
    return gains


def rc_gains(pool: Sequence[int], candidates: CandidateSet) -> np.ndarray:
    return np.array([1.0 if c in candidates else 0.0 for c in pool])


def size_gain(c, candidates, anchor, tau_i, D) -> float:
    return float(size_gains([c], candidates, anchor, tau_i, D)[0])


def drs_gain(c, candidates, anchor, tau_i, D) -> float:
    return float(drs_gains([c], candidates, anchor, tau_i, D)[0])


def rc_gain(c: int, candidates: CandidateSet) -> float:
    return float(rc_gains([c], candidates)[0])


def select_sensor(
    pool: Sequence[int],
    gains: np.ndarray,
    kind: GainKind,
    rng: np.random.Generator,
) -> int:
    """argmax；SIZE / DRS 平手取最小編號，RC 平手隨機，RANDOM 直接均勻抽樣"""
    pool = list(pool)
    if kind == GainKind.RANDOM:
        return int(pool[rng.integers(len(pool))])
    best = gains.max()
    tied = [c for c, g in zip(pool, gains) if g >= best - TOLERANCE.GAIN_TIE_TOL]
    if kind == GainKind.RC and len(tied) > 1:
        return int(tied[rng.integers(len(tied))])
    return int(min(tied))
