"""
설정 파일 - 프로세스 단위 설정(로그 레벨, 산출물 버전, 출력 포맷) 관리
"""

import os
from functools import lru_cache
import logging

from reputation import __version__

# 로깅 설정
logger = logging.getLogger(__name__)

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def parse_log_level(value: str) -> str:
    """환경 변수 값을 로그 레벨 문자열로 정규화 (알 수 없는 값은 INFO)"""
    if not value:
        return "INFO"
    level = value.strip().upper()
    return level if level in VALID_LOG_LEVELS else "INFO"


class Settings:
    """애플리케이션 설정 - 로그 레벨만 환경 변수에서 읽음"""

    def __init__(self):
        # 로깅 설정 (동작을 바꾸는 환경 변수는 두지 않음)
        self.LOG_LEVEL = parse_log_level(os.getenv("REPUTATION_LOG_LEVEL", "INFO"))

        # 산출물 설정
        self.ARTIFACT_VERSION = __version__
        self.CSV_SIGNIFICANT_DIGITS = 12
        self.DEFAULT_FORMAT = "both"

        # 설정 로드 로그
        logger.info("=== 솔버 설정 로드 ===")
        logger.info(f"LOG_LEVEL: {self.LOG_LEVEL}")
        logger.info(f"ARTIFACT_VERSION: {self.ARTIFACT_VERSION}")
        logger.info(f"CSV_SIGNIFICANT_DIGITS: {self.CSV_SIGNIFICANT_DIGITS}")
        logger.info(f"DEFAULT_FORMAT: {self.DEFAULT_FORMAT}")
        logger.info("=====================")

    @property
    def CSV_FLOAT_FORMAT(self) -> str:
        """pandas to_csv 용 실수 포맷 문자열"""
        return f"%.{self.CSV_SIGNIFICANT_DIGITS}g"


@lru_cache()
def get_settings() -> Settings:
    """
    설정 객체 싱글톤 반환 (캐싱 적용)
    """
    return Settings()
