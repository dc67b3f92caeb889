"""
산출물 내보내기 - CSV (출처 주석 + 헤더), JSON, 엑셀 통합문서
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional
import logging

import openpyxl
import pandas as pd
from openpyxl.styles import Alignment, Font, PatternFill

from reputation.utils.config import get_settings
from reputation.utils.json_util import custom_json_dumps

# 로깅 설정
logger = logging.getLogger(__name__)


def provenance_lines(provenance: Mapping[str, Any]) -> List[str]:
    """출처 정보를 '# key: value' 주석 줄로 변환 (키 정렬)"""
    lines = []
    for key in sorted(provenance):
        value = custom_json_dumps(provenance[key], indent=None)
        lines.append(f"# {key}: {value}")
    return lines


def write_csv(frame: pd.DataFrame, path: Path, provenance: Mapping[str, Any]) -> Path:
    """출처 주석 줄 뒤에 헤더와 12 유효숫자 실수로 CSV 기록"""
    settings = get_settings()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in provenance_lines(provenance):
            f.write(line + "\n")
        frame.to_csv(f, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"CSV 저장: {path} ({len(frame)}행)")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    """출처 주석 줄을 건너뛰고 CSV 읽기"""
    return pd.read_csv(path, comment="#")


def write_json(record: Any, path: Path, provenance: Optional[Mapping[str, Any]] = None) -> Path:
    """결정적 JSON 기록 (provenance 키 포함)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"provenance": dict(provenance or {}), "result": record}
    path.write_text(custom_json_dumps(payload) + "\n", encoding="utf-8")
    logger.info(f"JSON 저장: {path}")
    return path


def write_xlsx(
    sheets: Mapping[str, pd.DataFrame], path: Path, provenance: Mapping[str, Any]
) -> Path:
    """시트별 표와 출처 시트를 담은 엑셀 통합문서 기록"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    provenance_frame = pd.DataFrame(
        [
            {"key": key, "value": custom_json_dumps(provenance[key], indent=None)}
            for key in sorted(provenance)
        ]
    )

    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        all_sheets = dict(sheets)
        all_sheets["provenance"] = provenance_frame
        for sheet_name, df in all_sheets.items():
            df.to_excel(writer, sheet_name=sheet_name, index=False)
            worksheet = writer.sheets[sheet_name]

            # 열 너비 조정
            for i, column in enumerate(df.columns):
                values = df[column].astype(str).map(len)
                longest = int(values.max()) if len(values) else 0
                column_width = min(max(longest, len(str(column)) + 2, 8), 50)
                worksheet.column_dimensions[
                    openpyxl.utils.get_column_letter(i + 1)
                ].width = column_width

            # 헤더 스타일 설정
            header_font = Font(bold=True, size=11)
            header_fill = PatternFill(start_color="E0E0E0", end_color="E0E0E0", fill_type="solid")
            header_alignment = Alignment(horizontal="center", vertical="center", wrap_text=True)
            for cell in worksheet[1]:
                cell.font = header_font
                cell.fill = header_fill
                cell.alignment = header_alignment

    logger.info(f"엑셀 저장: {path} (시트 {len(sheets)}개)")
    return path


class ArtifactWriter:
    """
    명령 하나의 산출물 기록기

    포맷 규칙: csv 는 표만, json 은 레코드만, both 는 둘 다, xlsx 는 both + 통합문서.
    """

    def __init__(self, out_dir: Path, fmt: str, provenance: Dict[str, Any]):
        self.out_dir = Path(out_dir)
        self.fmt = fmt
        self.provenance = provenance
        self.written: List[str] = []

    @property
    def wants_csv(self) -> bool:
        return self.fmt in ("csv", "both", "xlsx")

    @property
    def wants_json(self) -> bool:
        return self.fmt in ("json", "both", "xlsx")

    def table(self, stem: str, frame: pd.DataFrame, force: bool = False) -> None:
        """표 산출물 기록"""
        if self.wants_csv or force:
            self._record(write_csv(frame, self.out_dir / f"{stem}.csv", self.provenance))
        if self.fmt == "xlsx":
            self._record(write_xlsx({stem: frame}, self.out_dir / f"{stem}.xlsx", self.provenance))

    def record(self, stem: str, record: Any, force: bool = False) -> None:
        """JSON 레코드 산출물 기록"""
        if self.wants_json or force:
            self._record(write_json(record, self.out_dir / f"{stem}.json", self.provenance))

    def _record(self, path: Path) -> None:
        self.written.append(str(path))
