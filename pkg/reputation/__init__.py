"""
평판-캐스케이드 동학 솔버 패키지
"""

__version__ = "0.1.0"
