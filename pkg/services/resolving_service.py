"""
雙解析集服務 - v1.0
✅ 見證集合誘導的等價類（距離差簽章）
✅ DRS 驗證
✅ 多起點貪婪 k-DRS、近似 DMD
✅ 小圖的暴力精確 DMD（驗證用）
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from services.errors import ConfigError, DomainError
from services.graph_service import DistanceMatrix
from services.logger import logger


@dataclass(frozen=True)
class ResolvingPartition:
    """見證集合 W 與它誘導的 V 的分割（每個類別依最小成員排序）"""
    witness_set: Tuple[int, ...]
    classes: Tuple[Tuple[int, ...], ...]

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def class_of(self, v: int) -> Tuple[int, ...]:
        for members in self.classes:
            if v in members:
                return members
        raise DomainError(f"node {v} is not in the partition")


def _signature_labels(dq: np.ndarray, witnesses: Sequence[int]) -> np.ndarray:
    """每個節點的簽章 (d(u,w) - d(u,w0))_w 轉成類別編號，w0 為最小編號"""
    anchor = min(witnesses)
    signature = dq[:, list(witnesses)] - dq[:, [anchor]]
    _, labels = np.unique(signature, axis=0, return_inverse=True)
    return labels.reshape(-1)


def _validate_witnesses(D: DistanceMatrix, witnesses: Iterable[int]) -> List[int]:
    witnesses = sorted(set(int(w) for w in witnesses))
    if not witnesses:
        raise DomainError("witness set must be non-empty")
    for w in witnesses:
        if not 0 <= w < D.n:
            raise DomainError(f"witness {w} is not a node")
    return witnesses


def equivalence_classes(D: DistanceMatrix, witness_set: Iterable[int]) -> ResolvingPartition:
    witnesses = _validate_witnesses(D, witness_set)
    labels = _signature_labels(D.quantized(), witnesses)
    groups = {}
    for v, label in enumerate(labels.tolist()):
        groups.setdefault(label, []).append(v)
    classes = sorted(tuple(members) for members in groups.values())
    return ResolvingPartition(witness_set=tuple(witnesses), classes=tuple(classes))


def class_count(D: DistanceMatrix, witness_set: Iterable[int]) -> int:
    witnesses = _validate_witnesses(D, witness_set)
    return int(_signature_labels(D.quantized(), witnesses).max()) + 1


def is_drs(D: DistanceMatrix, candidate_set: Iterable[int]) -> bool:
    """|Z| >= 2 且每個節點的簽章都不同"""
    candidate_set = set(candidate_set)
    if len(candidate_set) < 2:
        return False
    return class_count(D, candidate_set) == D.n


# ==================== 貪婪成長 ====================

def _grow(
    dq: np.ndarray,
    seed: int,
    steps: int,
    stop_when_resolved: bool = False,
    size_limit: Optional[int] = None,
) -> Tuple[List[int], int]:
    """從 {seed} 開始，每次加入使類別數最大的節點（平手取最小編號）。

    只保留仍在非單例類別中的列，已解析的節點不再參與排序。
    """
    n = dq.shape[0]
    offsets = dq - dq[:, [seed]]
    offsets = offsets - offsets.min()
    span = int(offsets.max()) + 1

    witnesses = [seed]
    in_w = np.zeros(n, dtype=bool)
    in_w[seed] = True
    active = np.arange(n)
    labels = np.zeros(n, dtype=np.int64)
    count = 1 if n > 1 else n

    for _ in range(steps):
        if stop_when_resolved and count == n:
            break
        if size_limit is not None and len(witnesses) >= size_limit:
            break

        singles = n - active.size
        if active.size:
            keys = labels[:, None] * span + offsets[active]
            keys.sort(axis=0)
            distinct = 1 + np.count_nonzero(np.diff(keys, axis=0), axis=0)
            scores = singles + distinct
        else:
            scores = np.full(n, n, dtype=np.int64)
        scores[in_w] = -1

        x = int(np.argmax(scores))
        witnesses.append(x)
        in_w[x] = True

        if active.size:
            _, inverse, sizes = np.unique(
                labels * span + offsets[active, x],
                return_inverse=True,
                return_counts=True,
            )
            inverse = inverse.reshape(-1)
            keep = sizes[inverse] > 1
            active = active[keep]
            _, labels = np.unique(inverse[keep], return_inverse=True)
            labels = labels.reshape(-1).astype(np.int64)
            count = (n - active.size) + (int(labels.max()) + 1 if active.size else 0)

    return witnesses, count


def _map(fn, items, max_workers: Optional[int]):
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            return list(executor.map(fn, items))
    return [fn(item) for item in items]


def greedy_k_drs(
    D: DistanceMatrix,
    k: int,
    max_workers: Optional[int] = None,
) -> Tuple[int, ...]:
    """每個起點成長 k-1 次，回傳類別數最多的集合（平手取字典序最小）"""
    if not 2 <= k <= D.n:
        raise ConfigError(f"k must be in [2, {D.n}], got {k}")

    dq = D.quantized()
    grown = _map(lambda seed: _grow(dq, seed, k - 1), range(D.n), max_workers)

    best_set, best_count = None, -1
    for witnesses, count in grown:
        candidate = tuple(sorted(witnesses))
        if count > best_count or (count == best_count and candidate < best_set):
            best_set, best_count = candidate, count

    logger.debug(f"k-DRS k={k}: {best_count}/{D.n} classes")
    return best_set


def approx_dmd(D: DistanceMatrix) -> int:
    """貪婪成長達到 N 個類別的最小集合大小（DMD 的上界）"""
    n = D.n
    if n < 2:
        raise ConfigError("approx_dmd requires N >= 2")

    dq = D.quantized()
    best = n
    for seed in range(n):
        witnesses, count = _grow(dq, seed, n - 1, stop_when_resolved=True, size_limit=best)
        if count == n and len(witnesses) < best:
            best = len(witnesses)
    logger.info(f"approx DMD = {best} (N={n})")
    return best


def exact_dmd(D: DistanceMatrix, max_n: int = 12) -> int:
    """暴力搜尋最小 DRS，只用於小圖"""
    if D.n > max_n:
        raise ConfigError(f"exact_dmd refuses N={D.n} > {max_n}")
    if D.n < 2:
        raise ConfigError("exact_dmd requires N >= 2")
    for k in range(2, D.n + 1):
        for subset in combinations(range(D.n), k):
            if is_drs(D, subset):
                return k
    return D.n
