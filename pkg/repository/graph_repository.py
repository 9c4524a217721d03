"""
網路圖資料存取層
✅ "u v w" 邊列表讀寫（保留原始標籤）
✅ 航空網路 "u v seats" 讀取與 "u v w" 權重輸出
"""
from typing import Dict, Tuple

from repository.base_repository import BaseFileRepository, PathLike
from services.graph_service import (
    Graph,
    load_edge_list,
    parse_seat_lines,
    wan_weight_lines,
    write_edge_list,
)


class GraphRepository(BaseFileRepository):
    """邊列表檔案存取物件"""

    def load(self, path: PathLike) -> Graph:
        """讀取邊列表並壓縮標籤"""
        return load_edge_list(self._read_text(path))

    def save(self, graph: Graph, path: PathLike) -> None:
        self._write_text(path, write_edge_list(graph))

    def load_seats(self, path: PathLike) -> Dict[Tuple[int, int], float]:
        """讀取 "u v seats"，雙向航線取平均"""
        return parse_seat_lines(self._read_text(path))

    def convert_seats(self, path: PathLike, alpha: float, theta: float) -> str:
        """讀取 u v seats 檔案並換算為 u v w 文字"""
        return wan_weight_lines(self._read_text(path), alpha, theta)

    def save_text(self, text: str, path: PathLike) -> None:
        self._write_text(path, text)
