"""
疫情模擬服務 - v1.0
✅ 有界延遲：θ_uv ~ Uniform[w(1-ε), w(1+ε)]
✅ 單一源頭 SI 傳播（只記錄首次感染時間）
✅ 每條邊的抽樣只取決於 (seed, 標準邊索引)
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import networkx as nx
import numpy as np

from config.constants import TOLERANCE
from services.errors import ConfigError, DomainError
from services.graph_service import Graph
from services.logger import logger


@dataclass(frozen=True)
class DelayAssignment:
    """每條邊一個傳播延遲，順序與 Graph.edges() 相同"""
    epsilon: float
    seed: int
    theta: np.ndarray
    edges: Tuple[Tuple[int, int], ...] = field(repr=False)

    def as_dict(self) -> Dict[Tuple[int, int], float]:
        return {edge: float(t) for edge, t in zip(self.edges, self.theta)}


@dataclass(frozen=True)
class EpidemicTrace:
    """真實疫情：源頭 v*、開始時間 t*、每個節點的首次感染時間"""
    source: int
    start_time: float
    infection_time: np.ndarray
    parent: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.infection_time)

    def is_infected(self, node: int, t: float) -> bool:
        return bool(self.infection_time[node] <= t + TOLERANCE.TIME_TOL)

    def infected_at(self, t: float) -> np.ndarray:
        """時間 t 之前（含）已感染的節點"""
        return np.flatnonzero(self.infection_time <= t + TOLERANCE.TIME_TOL)

    def fraction_infected(self, t: float) -> float:
        return len(self.infected_at(t)) / self.n


def sample_delays(graph: Graph, epsilon: float, rng_seed: int) -> DelayAssignment:
    """θ = w(1-ε) + 2εw·U，U 由 Philox 計數器式產生器依標準邊順序產生"""
    if not 0 <= epsilon <= 1:
        raise ConfigError(f"epsilon must be in [0, 1], got {epsilon}")

    edges = graph.edges()
    weights = np.array([w for _, _, w in edges], dtype=float)
    if epsilon == 0:
        theta = weights.copy()
    else:
        rng = np.random.Generator(np.random.Philox(rng_seed))
        uniform = rng.random(len(edges))
        theta = weights * (1 - epsilon) + 2 * epsilon * weights * uniform
    theta.setflags(write=False)
    return DelayAssignment(
        epsilon=epsilon,
        seed=rng_seed,
        theta=theta,
        edges=tuple((u, v) for u, v, _ in edges),
    )


def spread(
    graph: Graph,
    delays: DelayAssignment,
    source: int,
    start_time: float = 0.0,
) -> EpidemicTrace:
    """一次 Dijkstra：infection_time(v) = start_time + θ 加權最短路徑長度"""
    if not 0 <= source < graph.n:
        raise DomainError(f"source {source} is not a node of the graph")
    if len(delays.theta) != graph.num_edges:
        raise DomainError("delay assignment does not match the graph")

    theta = delays.as_dict()

    def edge_delay(u, v, _data):
        return theta[(u, v) if u < v else (v, u)]

    # networkx 的 Dijkstra 允許 ε=1 時的零延遲邊
    pred, dist = nx.dijkstra_predecessor_and_distance(
        graph.nx_graph, source, weight=edge_delay
    )
    if len(dist) != graph.n:
        raise DomainError("epidemic cannot reach every node (disconnected graph)")

    times = np.empty(graph.n, dtype=float)
    parent = np.full(graph.n, -1, dtype=np.int64)
    for v, d in dist.items():
        times[v] = start_time + d
        if pred[v]:
            parent[v] = min(pred[v])
    times.setflags(write=False)
    parent.setflags(write=False)

    logger.debug(
        f"傳播完成: source={source} eps={delays.epsilon} "
        f"last_infection={times.max() - start_time:.3f}"
    )
    return EpidemicTrace(source=source, start_time=start_time, infection_time=times, parent=parent)


def simulate(
    graph: Graph,
    source: int,
    epsilon: float,
    rng_seed: int,
    start_time: float = 0.0,
) -> EpidemicTrace:
    """sample_delays + spread"""
    return spread(graph, sample_delays(graph, epsilon, rng_seed), source, start_time)

