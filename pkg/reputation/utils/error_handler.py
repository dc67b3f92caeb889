"""
오류 처리를 위한 공통 예외 및 유틸리티 함수
"""

from typing import Dict, Any, Optional, List
import logging

logger = logging.getLogger(__name__)


class ReputationError(Exception):
    """솔버 공통 예외 (메시지, 내부 오류 코드, 상세 정보)"""

    error_code = "REPUTATION_ERROR"
    exit_status = 1

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        if error_code:
            self.error_code = error_code
        self.details = details or {}


class InvalidParameterError(ReputationError):
    """모델/솔버 파라미터 불변식 위반"""

    error_code = "INVALID_PARAMETER"


class ConvergenceError(ReputationError):
    """가치 반복이 max_iter 안에 수렴하지 못함"""

    error_code = "NOT_CONVERGED"


class DomainError(ReputationError):
    """신념 범위 이탈 또는 행동/결과 조합 불일치"""

    error_code = "DOMAIN_ERROR"


class ConfigSchemaError(ReputationError):
    """설정 문서 형식 오류 (알 수 없는 키, 파싱 실패)"""

    error_code = "CONFIG_SCHEMA"
    exit_status = 2


class ConfigValidationError(ReputationError):
    """설정 값이 불변식을 위반"""

    error_code = "CONFIG_VALIDATION"
    exit_status = 2


def pydantic_error_details(exc: Exception, prefix: str = "") -> List[Dict[str, Any]]:
    """pydantic ValidationError 를 (필드 경로, 메시지) 목록으로 변환"""
    errors = getattr(exc, "errors", None)
    if errors is None:
        return [{"field": prefix or None, "message": str(exc)}]
    details = []
    for err in errors():
        loc = ".".join(str(part) for part in err.get("loc", ()))
        field = f"{prefix}.{loc}" if prefix and loc else (prefix or loc)
        details.append({"field": field, "message": err.get("msg", "")})
    return details


def create_error_record(
    message: str,
    error_code: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    표준화된 오류 레코드 생성

    Args:
        message: 오류 메시지
        error_code: 내부 오류 코드 (선택)
        details: 상세 오류 정보 (선택)

    Returns:
        Dict: 기계 판독용 오류 레코드
    """
    content: Dict[str, Any] = {"success": False, "message": message}

    if error_code:
        content["error_code"] = error_code

    if details:
        content["details"] = details

    logger.error(f"오류 레코드: {message} (내부 코드: {error_code})")
    return content


def create_success_record(
    data: Any = None,
    message: Optional[str] = None,
) -> Dict[str, Any]:
    """
    표준화된 성공 레코드 생성

    Args:
        data: 결과 데이터
        message: 성공 메시지 (선택)

    Returns:
        Dict: 성공 레코드 구조
    """
    response: Dict[str, Any] = {"success": True}

    if message:
        response["message"] = message

    if data is not None:
        response["data"] = data

    return response


def handle_exceptions(
    func_name: str,
    exception: Exception,
    error_message: str,
) -> Dict[str, Any]:
    """
    예외 처리 및 로깅 도우미 함수

    Args:
        func_name: 예외가 발생한 함수 이름
        exception: 발생한 예외
        error_message: 사용자에게 표시할 오류 메시지

    Returns:
        Dict: 오류 레코드
    """
    if isinstance(exception, ReputationError):
        logger.error(f"{func_name} 함수에서 오류 발생: {exception.message}")
        return create_error_record(
            message=f"{error_message}: {exception.message}",
            error_code=exception.error_code,
            details=exception.details,
        )

    logger.error(f"{func_name} 함수에서 오류 발생: {str(exception)}", exc_info=True)
    return create_error_record(message=error_message, error_code="INTERNAL_ERROR")
