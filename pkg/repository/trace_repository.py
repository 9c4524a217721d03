"""
疫情軌跡資料存取層
格式：第一行 "# source=<label>,start_time=<t>"，接著 "node,infection_time"（原始標籤）
"""
import io

import numpy as np
import pandas as pd

from repository.base_repository import BaseFileRepository, PathLike
from services.epidemic_service import EpidemicTrace
from services.errors import DomainError
from services.graph_service import Graph
from services.logger import logger


class TraceRepository(BaseFileRepository):
    """疫情軌跡 CSV 存取物件"""

    def save(self, trace: EpidemicTrace, graph: Graph, path: PathLike) -> None:
        frame = pd.DataFrame({
            "node": [graph.labels[v] for v in range(trace.n)],
            "infection_time": trace.infection_time,
        })
        header = f"# source={graph.labels[trace.source]},start_time={trace.start_time!r}\n"
        self._write_text(path, header + frame.to_csv(index=False, float_format="%.12g"))

    def load(self, path: PathLike, graph: Graph) -> EpidemicTrace:
        """讀取軌跡並對應回圖的節點編號"""
        text = self._read_text(path)
        first, _, body = text.partition("\n")
        meta = self._parse_header(first)

        frame = pd.read_csv(io.StringIO(body))
        if set(frame.columns) != {"node", "infection_time"}:
            raise DomainError(f"trace file {path} must have columns node,infection_time")
        if len(frame) != graph.n:
            raise DomainError(f"trace has {len(frame)} nodes, graph has {graph.n}")

        times = np.empty(graph.n, dtype=float)
        for label, t in zip(frame["node"].tolist(), frame["infection_time"].tolist()):
            times[graph.index_of(label)] = float(t)
        times.setflags(write=False)

        source = graph.index_of(int(meta["source"]))
        parent = np.full(graph.n, -1, dtype=np.int64)
        logger.info(f"✅ 讀取軌跡: source={meta['source']} N={graph.n}")
        return EpidemicTrace(
            source=source,
            start_time=float(meta["start_time"]),
            infection_time=times,
            parent=parent,
        )

    @staticmethod
    def _parse_header(line: str) -> dict:
        if not line.startswith("#"):
            raise DomainError("trace file must start with '# source=...,start_time=...'")
        meta = {}
        for part in line.lstrip("#").strip().split(","):
            key, _, value = part.partition("=")
            meta[key.strip()] = value.strip()
        if "source" not in meta or "start_time" not in meta:
            raise DomainError("trace header needs source and start_time")
        return meta
