"""
雜訊模式 Size-Gain - v1.0
✅ 感測器感染時間的上下界
✅ 單位步長的數值積分（整數 h）
✅ 延遲總和的分佈：單位權重路徑用精確 Irwin-Hall，否則高斯近似
✅ 晚到（τ_i 之前未感染）項
"""

import math
from typing import Sequence, Tuple

import numpy as np
from scipy import special
from scipy.stats import norm

from config.constants import LOCALIZATION, TOLERANCE
from services.candidate_service import CandidateSet, ObservationLog, noisy_consistency_mask
from services.errors import ConfigError
from services.graph_service import DistanceMatrix


def irwin_hall_cdf(x, n) -> np.ndarray:
    """n 個 U(0,1) 總和的 CDF，x 超過 n/2 時用對稱 F(x) = 1 - F(n - x)"""
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=np.int64)
    x, n = np.broadcast_arrays(x, n)
    reflect = x > n / 2
    z = np.clip(np.where(reflect, n - x, x), 0, None)

    j = np.arange(LOCALIZATION.IRWIN_HALL_MAX_TERMS + 1).reshape((-1,) + (1,) * x.ndim)
    terms = (
        (-1.0) ** j
        * special.binom(n, j)
        * np.power(np.maximum(z - j, 0.0), n)
    )
    cdf = terms.sum(axis=0) / special.factorial(n)
    cdf = np.where(reflect, 1.0 - cdf, cdf)
    cdf = np.where(x <= 0, 0.0, np.where(x >= n, 1.0, cdf))
    return np.clip(cdf, 0.0, 1.0)


def delay_sum_cdf(x: np.ndarray, sources: np.ndarray, c: int, epsilon: float, D: DistanceMatrix) -> np.ndarray:
    """P(X_v <= x)，X_v 為 v 到 c 最短路徑上延遲的總和（x 的最後一維對應 sources）"""
    hops = D.hops[sources, c]
    dist = D.d[sources, c]
    sq = D.sq_weights[sources, c]

    unit_path = (
        (np.abs(dist - hops) <= TOLERANCE.TIME_TOL)
        & (np.abs(sq - hops) <= TOLERANCE.TIME_TOL)
        & (hops <= LOCALIZATION.IRWIN_HALL_MAX_TERMS)
    )
    n = np.maximum(hops, 1)
    exact = irwin_hall_cdf((x - n * (1 - epsilon)) / (2 * epsilon), n)

    scale = np.maximum(epsilon * np.sqrt(sq / 3.0), np.finfo(float).tiny)
    gaussian = norm.cdf(x, loc=dist, scale=scale)

    step = (x >= 0).astype(float)
    return np.where(hops == 0, step, np.where(unit_path, exact, gaussian))


def noisy_time_bounds(
    c: int,
    candidates: CandidateSet,
    log: ObservationLog,
    epsilon: float,
    D: DistanceMatrix,
) -> Tuple[float, float]:
    """t' = min_v max_p [t_p + (1-ε)d(v,c) - (1+ε)d(v,u_p)]，t'' = max_v min_p [t_p + (1+ε)d(v,c) - (1-ε)d(v,u_p)]"""
    members = candidates.index
    positives = log.positives()
    times = np.array([obs.time for obs in positives], dtype=float)[:, None]
    dp = D.d[np.ix_([obs.node for obs in positives], members)]
    dc = D.d[members, c][None, :]

    lower = (times + (1 - epsilon) * dc - (1 + epsilon) * dp).max(axis=0).min()
    upper = (times + (1 + epsilon) * dc - (1 - epsilon) * dp).min(axis=0).max()
    return float(lower), float(upper)


def noisy_size_gain(
    c: int,
    candidates: CandidateSet,
    log: ObservationLog,
    epsilon: float,
    tau_i: float,
    D: DistanceMatrix,
    tolerance_scale: float = 1.0,
) -> float:
    """Σ_h P(t_c ≈ h)(|B| - |a(c,h)|) + P(t_c > τ_i)(|B| - |ã(c)|)"""
    if epsilon <= 0:
        raise ConfigError("noisy_size_gain requires epsilon > 0")
    size = len(candidates)
    if size <= 1:
        return 0.0

    members = candidates.index
    weights = candidates.weights()
    eps = tolerance_scale * epsilon
    tol = TOLERANCE.TIME_TOL

    positives = log.positives()
    negatives = log.open_negatives()
    pos_times = np.array([obs.time for obs in positives], dtype=float)
    dp = D.d[np.ix_([obs.node for obs in positives], members)]
    dc = D.d[members, c]

    lower, upper = noisy_time_bounds(c, candidates, log, epsilon, D)
    hs = np.arange(math.ceil(lower - tol), math.floor(min(upper, tau_i) + tol) + 1, dtype=float)

    # 既有的正向×尚未感染觀測先以新的 τ_i 重新檢查
    base = noisy_consistency_mask(candidates, positives, negatives, eps, tau_i, D)

    # t* 以 τ0 - d(v, s0) 估計
    start = log.anchor_time - D.d[members, log.anchor_node]
    gain = 0.0

    if hs.size:
        h = hs[:, None, None]
        eq_pos = np.abs(dc[None, None, :] - dp[None, :, :] - h + pos_times[None, :, None])
        keep = (eq_pos <= eps * (dc + dp)[None, :, :] + tol).all(axis=1) & base[None, :]
        if negatives:
            dn = D.d[np.ix_([obs.node for obs in negatives], members)]
            eq_neg = tau_i - h - dn[None, :, :] + dc[None, None, :]
            keep &= (eq_neg < eps * (dc + dn)[None, :, :] + tol).all(axis=1)
        consistent = keep.sum(axis=1)

        lo = hs[:, None] - 0.5 - start[None, :]
        hi = hs[:, None] + 0.5 - start[None, :]
        mass = delay_sum_cdf(hi, members, c, epsilon, D) - delay_sum_cdf(lo, members, c, epsilon, D)
        gain += float(np.dot(mass @ weights, size - consistent))

    late = tau_i - pos_times[:, None] - dc[None, :] + dp
    late_consistent = int(((late < eps * (dp + dc[None, :]) + tol).all(axis=0) & base).sum())
    late_mass = 1.0 - delay_sum_cdf(tau_i - start, members, c, epsilon, D)
    gain += float(np.dot(late_mass, weights)) * (size - late_consistent)
    return gain


def noisy_size_gains(
    pool: Sequence[int],
    candidates: CandidateSet,
    log: ObservationLog,
    epsilon: float,
    tau_i: float,
    D: DistanceMatrix,
    tolerance_scale: float = 1.0,
) -> np.ndarray:
    return np.array([
        noisy_size_gain(c, candidates, log, epsilon, tau_i, D, tolerance_scale)
        for c in pool
    ])
