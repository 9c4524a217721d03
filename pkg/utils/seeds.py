"""
種子推導
每個試驗、每種用途各有獨立的 64-bit 種子，新增基準線不會改變疫情抽樣
"""
import hashlib


def derive_seed(master_seed: int, *parts) -> int:
    """sha256(master_seed, parts...) 的前 8 bytes"""
    payload = ":".join(str(p) for p in (master_seed,) + parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")
