from typing import List, Optional


def parse_nodes(text: str) -> List[int]:
    """
    解析逗號分隔的節點列表

    Args:
        text: 例如 "0,5,9"

    Returns:
        List[int]: 節點標籤
    """
    nodes = []
    for token in text.split(","):
        token = token.strip()
        if token:
            nodes.append(int(token))
    return nodes


def parse_budget(text: Optional[str]) -> Optional[int]:
    """動態感測器預算："inf" / 空值 -> None（無上限），其餘轉整數"""
    if text is None:
        return None
    text = str(text).strip().lower()
    if text in ("", "inf", "infinity", "none"):
        return None
    value = int(text)
    if value < 0:
        raise ValueError(f"budget must be non-negative, got {value}")
    return value
