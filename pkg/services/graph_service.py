"""
網路圖服務 - v1.0
✅ 加權無向圖（凍結的 networkx 圖 + 原始標籤對照）
✅ 邊列表解析 / 輸出
✅ 全點對最短路徑（scipy Dijkstra）
✅ 隨機圖產生器：ER / BA / 球面 RGG / 正則樹 / 冪律樹
✅ 航空網路邊權重
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import ValidationError
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from config.constants import GENERATOR, TOLERANCE, WAN
from schemas.graph import GeneratorSpec
from services.errors import (
    ConfigError,
    DisconnectedGraphError,
    DomainError,
    EdgeListParseError,
)
from services.logger import logger


# ==================== 資料型別 ====================

@dataclass(frozen=True)
class Graph:
    """加權無向圖，節點為 0..N-1 的連續整數，建立後不可變。"""
    nx_graph: nx.Graph
    labels: Tuple[int, ...]

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int, float]],
        labels: Optional[Sequence[int]] = None,
    ) -> "Graph":
        g = nx.Graph()
        g.add_nodes_from(range(n))
        for u, v, w in edges:
            if u == v:
                raise DomainError(f"self loop on node {u}")
            if g.has_edge(u, v):
                raise DomainError(f"duplicate edge ({u}, {v})")
            if not w > 0 or not math.isfinite(w):
                raise DomainError(f"edge ({u}, {v}) has non-positive weight {w}")
            g.add_edge(u, v, weight=float(w))
        labels = tuple(range(n)) if labels is None else tuple(labels)
        if len(labels) != n:
            raise DomainError("label map size does not match node count")
        return cls(nx_graph=nx.freeze(g), labels=labels)

    @classmethod
    def from_networkx(cls, g: nx.Graph, weight: Optional[float] = 1.0) -> "Graph":
        """由 networkx 圖建立；節點依排序後重新編號，weight=None 時沿用邊屬性。"""
        order = sorted(g.nodes())
        index = {node: i for i, node in enumerate(order)}
        edges = []
        for u, v, data in g.edges(data=True):
            w = weight if weight is not None else data.get("weight", 1.0)
            edges.append((index[u], index[v], w))
        labels = [node if isinstance(node, int) else i for i, node in enumerate(order)]
        return cls.from_edges(len(order), edges, labels)

    @property
    def n(self) -> int:
        return self.nx_graph.number_of_nodes()

    @property
    def num_edges(self) -> int:
        return self.nx_graph.number_of_edges()

    def edges(self) -> List[Tuple[int, int, float]]:
        """標準邊順序：(u, v) 以 u < v 排序，邊索引即為此串列的位置。"""
        out = []
        for u, v, data in self.nx_graph.edges(data=True):
            a, b = (u, v) if u < v else (v, u)
            out.append((a, b, data["weight"]))
        out.sort()
        return out

    def weight(self, u: int, v: int) -> float:
        return self.nx_graph[u][v]["weight"]

    def neighbors(self, u: int) -> List[int]:
        return sorted(self.nx_graph.neighbors(u))

    def is_connected(self) -> bool:
        return self.n > 0 and nx.is_connected(self.nx_graph)

    def is_integral(self) -> bool:
        return all(float(w).is_integer() for _, _, w in self.edges())

    def index_of(self, label: int) -> int:
        """原始標籤 -> 節點編號"""
        try:
            return self.labels.index(int(label))
        except ValueError as e:
            raise DomainError(f"unknown node label {label}") from e

    def to_csr(self, weights: Optional[Sequence[float]] = None) -> csr_matrix:
        """轉成對稱稀疏矩陣；weights 依標準邊順序覆寫權重。"""
        edges = self.edges()
        if weights is None:
            weights = [w for _, _, w in edges]
        rows = [u for u, _, _ in edges] + [v for _, v, _ in edges]
        cols = [v for _, v, _ in edges] + [u for u, _, _ in edges]
        data = list(weights) + list(weights)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


@dataclass(frozen=True)
class DistanceMatrix:
    """最短路徑距離矩陣 d(u, v)，唯讀。

    hops / sq_weights 記錄所選最短路徑的邊數與權重平方和，
    供雜訊模式的 Size-Gain 計算延遲總和的變異數。
    """
    d: np.ndarray
    integral: bool
    hops: np.ndarray = field(repr=False)
    sq_weights: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __getitem__(self, key):
        return self.d[key]

    def quantized(self) -> np.ndarray:
        """簽章比較用的整數鍵：整數權重直接取整，否則以 1e-9 量化。"""
        return quantize(self.d, self.integral)


def quantize(values: np.ndarray, integral: bool) -> np.ndarray:
    """把實數轉成可做精確相等比較的 int64 鍵"""
    values = np.asarray(values, dtype=float)
    if integral:
        return np.rint(values).astype(np.int64)
    return np.rint(values / TOLERANCE.SIGNATURE_TOL).astype(np.int64)


# ==================== 邊列表 I/O ====================

def load_edge_list(text: str) -> Graph:
    """解析 "u v w" 邊列表（'#' 註解、w 省略為 1.0），標籤壓縮為 0..N-1。"""
    raw_edges: List[Tuple[int, int, float]] = []
    seen = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if len(tokens) not in (2, 3):
            raise EdgeListParseError(line_no, line, "expected 'u v [w]'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(line_no, line, "non-integer node label")
        try:
            w = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError:
            raise EdgeListParseError(line_no, line, "non-numeric weight")
        if not math.isfinite(w) or w <= 0:
            raise EdgeListParseError(line_no, line, "non-positive weight")
        if u == v:
            raise EdgeListParseError(line_no, line, "self loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListParseError(line_no, line, "duplicate edge")
        seen.add(key)
        raw_edges.append((u, v, w))

    if not raw_edges:
        raise EdgeListParseError(0, "", "empty edge list")

    labels = list(dict.fromkeys(x for u, v, _ in raw_edges for x in (u, v)))
    index = {label: i for i, label in enumerate(labels)}
    edges = [(index[u], index[v], w) for u, v, w in raw_edges]
    graph = Graph.from_edges(len(labels), edges, labels)
    logger.debug(f"解析邊列表: |V|={graph.n} |E|={graph.num_edges}")
    return graph


def write_edge_list(graph: Graph) -> str:
    """輸出 "u v w"，使用原始標籤"""
    lines = []
    for u, v, w in graph.edges():
        weight = int(w) if float(w).is_integer() else w
        lines.append(f"{graph.labels[u]} {graph.labels[v]} {weight}")
    return "\n".join(lines) + "\n"


# ==================== 最短路徑 ====================

def all_pairs_shortest_paths(graph: Graph) -> DistanceMatrix:
    """逐一來源的 Dijkstra（優先佇列）計算全點對加權最短距離"""
    dist, pred = dijkstra(graph.to_csr(), directed=False, return_predecessors=True)
    if np.isinf(dist).any():
        raise DisconnectedGraphError(
            f"graph with {graph.n} nodes is disconnected (infinite distances)"
        )

    n = graph.n
    hops = np.zeros((n, n), dtype=np.int64)
    sq = np.zeros((n, n), dtype=float)
    for s in range(n):
        for v in np.argsort(dist[s], kind="stable"):
            p = pred[s, v]
            if p < 0:
                continue
            w = graph.weight(int(p), int(v))
            hops[s, v] = hops[s, p] + 1
            sq[s, v] = sq[s, p] + w * w

    dist = 0.5 * (dist + dist.T)
    for arr in (dist, hops, sq):
        arr.setflags(write=False)
    return DistanceMatrix(d=dist, integral=graph.is_integral(), hops=hops, sq_weights=sq)


def distances_for(graph: Graph, require_connected: bool = True) -> DistanceMatrix:
    """定位前的連通檢查 + 距離矩陣"""
    if require_connected and not graph.is_connected():
        raise DisconnectedGraphError("localization requires a connected graph")
    return all_pairs_shortest_paths(graph)


# ==================== 隨機圖產生器 ====================

def build_generator_spec(**kwargs) -> GeneratorSpec:
    """建立 GeneratorSpec，驗證失敗轉成 ConfigError"""
    try:
        return GeneratorSpec(**{k: v for k, v in kwargs.items() if v is not None})
    except ValidationError as e:
        raise ConfigError(f"invalid generator spec: {e.errors()[0]['msg']}") from e


def generate(spec: GeneratorSpec) -> Graph:
    """依產生器設定建圖，所有邊權重為 1，相同設定產生相同邊集合。"""
    builders = {
        "er": _erdos_renyi,
        "ba": _barabasi_albert,
        "rgg": _sphere_geometric,
        "rt": _regular_tree,
        "plt": _power_law_tree,
    }
    if spec.model not in builders:
        raise ConfigError(f"unknown generator model {spec.model}")
    g = builders[spec.model](spec)
    graph = Graph.from_networkx(g, weight=1.0)
    logger.info(f"產生 {spec.label()} n={spec.n} seed={spec.seed}: |E|={graph.num_edges}")
    return graph


def _erdos_renyi(spec: GeneratorSpec) -> nx.Graph:
    if spec.p is None or not 0 < spec.p < 1:
        raise ConfigError("ER requires 0 < p < 1")
    for attempt in range(GENERATOR.ER_MAX_RETRIES):
        g = nx.fast_gnp_random_graph(spec.n, spec.p, seed=spec.seed + attempt)
        if nx.is_connected(g):
            logger.debug(f"ER 連通於第 {attempt + 1} 次嘗試")
            return g
    raise ConfigError(
        f"ER(n={spec.n}, p={spec.p}) not connected after {GENERATOR.ER_MAX_RETRIES} retries"
    )


def _barabasi_albert(spec: GeneratorSpec) -> nx.Graph:
    if spec.m is None or not 1 <= spec.m < spec.n:
        raise ConfigError("BA requires 1 <= m < n")
    return nx.barabasi_albert_graph(spec.n, spec.m, seed=spec.seed)


def _sphere_geometric(spec: GeneratorSpec) -> nx.Graph:
    """單位球面上的均勻點，大圓距離 <= R 則連邊"""
    if spec.radius is None or spec.radius <= 0:
        raise ConfigError("RGG requires radius > 0")
    for attempt in range(GENERATOR.RGG_MAX_RETRIES):
        rng = np.random.default_rng(spec.seed + attempt)
        points = rng.normal(size=(spec.n, 3))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        angles = np.arccos(np.clip(points @ points.T, -1.0, 1.0))
        us, vs = np.nonzero(np.triu(angles <= spec.radius, k=1))
        g = nx.Graph()
        g.add_nodes_from(range(spec.n))
        g.add_edges_from(zip(us.tolist(), vs.tolist()))
        if nx.is_connected(g):
            return g
    raise ConfigError(
        f"RGG(n={spec.n}, R={spec.radius}) not connected after {GENERATOR.RGG_MAX_RETRIES} retries"
    )


def _regular_tree(spec: GeneratorSpec) -> nx.Graph:
    """度數上限 degree 的最大樹：根節點 degree 個子節點，其餘 degree-1 個，廣度優先填滿"""
    if spec.degree is None or spec.degree < 2:
        raise ConfigError("RegularTree requires degree >= 2")
    g = nx.Graph()
    g.add_node(0)
    queue = deque([0])
    next_id = 1
    while next_id < spec.n:
        parent = queue.popleft()
        slots = spec.degree if parent == 0 else spec.degree - 1
        for _ in range(slots):
            if next_id >= spec.n:
                break
            g.add_edge(parent, next_id)
            queue.append(next_id)
            next_id += 1
    return g


def _power_law_tree(spec: GeneratorSpec) -> nx.Graph:
    """冪律度數序列（指數 2.5）修正到總和 2(n-1)，再以隨機 Prüfer 序列接線"""
    n = spec.n
    rng = np.random.default_rng(spec.seed)
    degrees = power_law_degree_sequence(n, GENERATOR.PLT_EXPONENT, rng)
    prufer = np.repeat(np.arange(n), degrees - 1)
    prufer = rng.permutation(prufer)
    return nx.from_prufer_sequence(prufer.tolist())


def power_law_degree_sequence(n: int, exponent: float, rng: np.random.Generator) -> np.ndarray:
    """樹可實現的冪律度數序列：每個度數 >= 1，總和 = 2(n-1)"""
    if n < 2:
        raise ConfigError("PowerLawTree requires n >= 2")
    support = np.arange(1, n)
    probs = support.astype(float) ** (-exponent)
    probs /= probs.sum()
    degrees = rng.choice(support, size=n, p=probs)

    target = 2 * (n - 1)
    excess = int(degrees.sum()) - target
    while excess > 0:
        reducible = np.flatnonzero(degrees > 1)
        i = rng.choice(reducible)
        degrees[i] -= 1
        excess -= 1
    while excess < 0:
        growable = np.flatnonzero(degrees < n - 1)
        i = rng.choice(growable)
        degrees[i] += 1
        excess += 1
    return degrees


# ==================== 航空網路權重 ====================

def wan_edge_weight(seats: float, alpha: float = WAN.ALPHA, theta: float = WAN.THETA) -> int:
    """w = [1 - exp(-α θ s)]^-1 四捨五入為整數，最小為 1"""
    if not seats > 0:
        raise DomainError(f"seats must be positive, got {seats}")
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    if not 0 < theta <= 1:
        raise DomainError(f"theta must be in (0, 1], got {theta}")
    w = 1.0 / -math.expm1(-alpha * theta * seats)
    return max(1, int(round(w)))


def parse_seat_lines(text: str) -> Dict[Tuple[int, int], float]:
    """解析 "u v seats"；同一航線兩個方向都出現時取平均"""
    directed: Dict[Tuple[int, int], float] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if len(tokens) != 3:
            raise EdgeListParseError(line_no, line, "expected 'u v seats'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
            seats = float(tokens[2])
        except ValueError:
            raise EdgeListParseError(line_no, line, "non-numeric field")
        if u == v:
            raise EdgeListParseError(line_no, line, "self loop")
        if (u, v) in directed:
            raise EdgeListParseError(line_no, line, "duplicate edge")
        directed[(u, v)] = seats

    merged: Dict[Tuple[int, int], float] = {}
    for (u, v), seats in directed.items():
        key = (min(u, v), max(u, v))
        if key in merged:
            continue
        back = directed.get((v, u))
        merged[key] = seats if back is None else 0.5 * (seats + back)
    return merged


def wan_weight_lines(text: str, alpha: float = WAN.ALPHA, theta: float = WAN.THETA) -> str:
    """ "u v seats" -> "u v w" """
    seats = parse_seat_lines(text)
    out = [
        f"{u} {v} {wan_edge_weight(s, alpha, theta)}"
        for (u, v), s in sorted(seats.items())
    ]
    return "\n".join(out) + "\n"


def preprocess_wan(
    seats: Dict[Tuple[int, int], float],
    min_seats: float = WAN.MIN_SEATS,
    alpha: float = WAN.ALPHA,
    theta: float = WAN.THETA,
) -> Graph:
    """移除座位數不足的航線、反覆移除葉節點、取最大連通元件，再套用權重"""
    g = nx.Graph()
    for (u, v), s in seats.items():
        if s >= min_seats:
            g.add_edge(u, v, weight=float(wan_edge_weight(s, alpha, theta)))
    g = nx.k_core(g, 2)
    if g.number_of_nodes() == 0:
        raise DomainError("no route survives preprocessing")
    largest = max(nx.connected_components(g), key=len)
    g = g.subgraph(largest).copy()
    logger.info(f"WAN 前處理完成: |V|={g.number_of_nodes()} |E|={g.number_of_edges()}")
    return Graph.from_networkx(g, weight=None)


# ==================== 統計 ====================

def graph_statistics(graph: Graph) -> Dict[str, float]:
    """網路統計：|V|、|E|、平均度數、平均最短路徑（邊數）、平均聚集係數"""
    g = graph.nx_graph
    stats = {
        "nodes": graph.n,
        "edges": graph.num_edges,
        "avg_degree": 2.0 * graph.num_edges / graph.n,
        "avg_clustering": nx.average_clustering(g),
    }
    stats["avg_shortest_path"] = (
        nx.average_shortest_path_length(g) if graph.is_connected() else float("inf")
    )
    return stats
