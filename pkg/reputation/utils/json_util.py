"""
JSON 관련 유틸리티
"""

import json
import math
from enum import Enum
from typing import Any, Optional
import logging

import numpy as np

logger = logging.getLogger(__name__)


def _sanitize(obj: Any) -> Any:
    """비유한 실수(nan, inf)를 null 로 바꾸고 numpy 값을 기본 타입으로 변환"""
    if isinstance(obj, dict):
        return {str(key): _sanitize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(value) for value in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class CustomJSONEncoder(json.JSONEncoder):
    """
    커스텀 JSON 인코더
    numpy 배열/스칼라, Enum, pydantic 모델 직렬화 지원
    """

    def default(self, obj: Any) -> Any:
        # numpy 타입 처리
        if isinstance(obj, (np.ndarray, np.generic)):
            return _sanitize(obj)

        # Enum 타입 처리
        if isinstance(obj, Enum):
            return obj.value

        # pydantic 모델 처리
        if hasattr(obj, "model_dump"):
            return _sanitize(obj.model_dump(by_alias=True))

        return super().default(obj)


def custom_json_dumps(obj: Any, indent: Optional[int] = 2) -> str:
    """
    결정적(키 정렬) JSON 직렬화 함수

    Args:
        obj: 직렬화할 객체

    Returns:
        str: JSON 문자열
    """
    try:
        return json.dumps(
            _sanitize(obj),
            cls=CustomJSONEncoder,
            ensure_ascii=False,
            sort_keys=True,
            indent=indent,
            allow_nan=False,
        )
    except (TypeError, ValueError) as e:
        logger.error(f"JSON 직렬화 오류: {str(e)}")
        if isinstance(obj, dict):
            for key, value in obj.items():
                try:
                    json.dumps({key: _sanitize(value)}, cls=CustomJSONEncoder, allow_nan=False)
                except (TypeError, ValueError):
                    logger.error(
                        f"직렬화 불가능한 필드: {key}, 타입={type(value).__name__}"
                    )
        raise
