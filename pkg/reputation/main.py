"""
명령행 진입점 - 설정 로드, 명령 실행, 성공/오류 레코드 출력
"""

import argparse
import sys
from typing import List, Optional
import logging

from reputation.utils.config import get_settings

# --- 로깅 설정 초기화 ---
settings = get_settings()

logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)

# --- 프로젝트 모듈 임포트 ---
from reputation.routes.command_route import COMMANDS, run_command
from reputation.service.config_service import load_config
from reputation.utils.error_handler import (
    ReputationError,
    create_success_record,
    handle_exceptions,
)
from reputation.utils.json_util import custom_json_dumps


def build_parser() -> argparse.ArgumentParser:
    """명령행 인자 정의"""
    parser = argparse.ArgumentParser(
        prog="reputation",
        description="평판 캐스케이드 동적계획 솔버와 시뮬레이터",
    )
    parser.add_argument("command", choices=list(COMMANDS), help="실행할 명령")
    parser.add_argument("--config", required=True, help="JSON 설정 파일 경로")
    parser.add_argument("--out", default=None, help="출력 디렉토리 (없으면 output.dir)")
    parser.add_argument("--seed", type=int, default=None, help="sim.seed 덮어쓰기")
    parser.add_argument(
        "--format",
        dest="fmt",
        choices=["csv", "json", "both", "xlsx"],
        default=None,
        help="출력 포맷 (없으면 output.format)",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """명령 실행 후 종료 코드 반환 (성공 0, 설정 오류 2, 그 외 1)"""
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed=args.seed)
        out_dir = args.out or config.output.dir
        if not out_dir:
            raise ReputationError(
                "출력 디렉토리가 지정되지 않았습니다 (--out 또는 output.dir)",
                error_code="MISSING_OUTPUT",
            )
        written = run_command(config, args.command, out_dir, args.fmt)
    except ReputationError as e:
        record = handle_exceptions("main", e, f"{args.command} 실행 실패")
        print(custom_json_dumps(record), file=sys.stderr)
        return e.exit_status
    except Exception as e:
        record = handle_exceptions("main", e, f"{args.command} 실행 중 예기치 않은 오류")
        print(custom_json_dumps(record), file=sys.stderr)
        return 1

    record = create_success_record(
        data={"command": args.command, "files": written},
        message=f"{args.command} 완료",
    )
    print(custom_json_dumps(record))
    return 0


if __name__ == "__main__":
    sys.exit(main())
