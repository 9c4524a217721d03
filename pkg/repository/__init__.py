"""
Repository 層：檔案讀寫
"""
