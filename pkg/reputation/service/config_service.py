"""
실행 설정 파싱 - JSON 문서 (중첩 또는 점 표기 평면 키) 를 RunConfig 로 검증
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional
import logging

from pydantic import ValidationError

from reputation.schema.config_schema import RunConfig
from reputation.utils.error_handler import (
    ConfigSchemaError,
    ConfigValidationError,
    pydantic_error_details,
)

logger = logging.getLogger(__name__)

SECTIONS = tuple(RunConfig.model_fields.keys())
MODEL_KEYS = ("v", "p", "q", "c", "delta", "tie_break")


def _nest(document: Dict[str, Any]) -> Dict[str, Any]:
    """점 표기 키와 최상위 모델 키를 섹션 구조로 정리"""
    nested: Dict[str, Any] = {}
    for key, value in document.items():
        if "." in key:
            section, _, field = key.partition(".")
            if not field or "." in field:
                raise ConfigSchemaError(
                    f"설정 키 형식이 잘못되었습니다: {key}", details={"field": key}
                )
            target = nested.setdefault(section, {})
            if not isinstance(target, dict):
                raise ConfigSchemaError(f"섹션 {section} 이 객체가 아닙니다", details={"field": section})
            if field in target:
                raise ConfigSchemaError(f"설정 키가 중복되었습니다: {key}", details={"field": key})
            target[field] = value
        elif key in MODEL_KEYS:
            target = nested.setdefault("model", {})
            if not isinstance(target, dict):
                raise ConfigSchemaError("섹션 model 이 객체가 아닙니다", details={"field": "model"})
            if key in target:
                raise ConfigSchemaError(
                    f"설정 키가 중복되었습니다: model.{key}", details={"field": f"model.{key}"}
                )
            target[key] = value
        else:
            if key in nested and isinstance(nested[key], dict) and isinstance(value, dict):
                overlap = set(nested[key]) & set(value)
                if overlap:
                    raise ConfigSchemaError(
                        f"설정 키가 중복되었습니다: {key}.{sorted(overlap)[0]}",
                        details={"field": f"{key}.{sorted(overlap)[0]}"},
                    )
                nested[key].update(value)
            else:
                nested[key] = value
    return nested


def config_from_dict(document: Dict[str, Any]) -> RunConfig:
    """딕셔너리를 RunConfig 로 검증"""
    if not isinstance(document, dict):
        raise ConfigSchemaError("설정 문서는 JSON 객체여야 합니다")
    nested = _nest(document)

    unknown = [key for key in nested if key not in SECTIONS]
    if unknown:
        raise ConfigSchemaError(
            f"알 수 없는 설정 키: {unknown[0]}", details={"field": unknown[0]}
        )
    if "model" not in nested:
        raise ConfigSchemaError("model 섹션이 필요합니다", details={"field": "model"})

    try:
        config = RunConfig(**nested)
    except ValidationError as e:
        details = pydantic_error_details(e)
        extra = [err for err, raw in zip(details, e.errors()) if raw.get("type") == "extra_forbidden"]
        if extra:
            raise ConfigSchemaError(
                f"알 수 없는 설정 키: {extra[0]['field']}", details={"errors": extra}
            )
        message = "; ".join(f"{item['field']}: {item['message']}" for item in details)
        raise ConfigValidationError(f"설정 검증 실패: {message}", details={"errors": details})

    logger.info(
        f"설정 로드 완료: model={config.model.model_dump()}, solver={config.solver.model_dump()}"
    )
    return config


def parse_config(text: str) -> RunConfig:
    """JSON 설정 문서를 파싱하고 검증"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSchemaError(
            f"설정 문서를 JSON 으로 읽을 수 없습니다: {e.msg} (line {e.lineno})"
        )
    return config_from_dict(document)


def load_config(path: str, seed: Optional[int] = None) -> RunConfig:
    """파일에서 설정을 읽고 명령행 시드를 덮어씀"""
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigSchemaError(f"설정 파일이 없습니다: {path}")
    config = parse_config(config_path.read_text(encoding="utf-8"))
    if seed is not None:
        if seed < 0:
            raise ConfigValidationError(
                f"seed 는 0 이상이어야 합니다: {seed}", details={"field": "sim.seed"}
            )
        config.sim = config.sim.model_copy(update={"seed": seed})
    return config


def config_to_record(config: RunConfig) -> Dict[str, Any]:
    """기본값이 채워진 설정 전체 (출력 메타데이터용)"""
    return config.model_dump()
