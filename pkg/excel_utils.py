from pathlib import Path
from typing import Sequence, Union

import pandas as pd
from openpyxl.styles import Font, PatternFill
from openpyxl.utils import get_column_letter
from openpyxl.worksheet.worksheet import Worksheet

from config import EXPECT_TABLE_COLUMNS, NEF_TABLE_COLUMNS, SHEET_NAMES
from report_utils import (
    Report,
    chain_table,
    discrepancy_table,
    expectation_table,
    nef_table,
    pi1_trace_table,
    summary_table,
)

RED_FILL = PatternFill(start_color="FFFFCCCC", end_color="FFFFCCCC", fill_type="solid")
HEADER_FONT = Font(bold=True)


def adjust_column_width(ws: Worksheet, df: pd.DataFrame, max_width: int = 70):
    """
    按表头和内容长度设置列宽。

    参数：
        ws: 刚写入的工作表
        df: 写入该表的 DataFrame
        max_width: 列宽上限
    """
    for i, col in enumerate(df.columns, 1):
        lengths = df[col].astype(str).map(len)
        max_len = max(lengths.max() if not lengths.empty else 0, len(str(col)))
        ws.column_dimensions[get_column_letter(i)].width = min(max_len + 4, max_width)


def highlight_rows(ws: Worksheet, df: pd.DataFrame, failing) -> int:
    """把 failing(row) 为真的数据行整行标红，返回标红行数。"""
    count = 0
    for offset, (_, row) in enumerate(df.iterrows()):
        if failing(row):
            for cell in ws[offset + 2]:
                cell.fill = RED_FILL
            count += 1
    return count


def _expectation_failed(row) -> bool:
    return not bool(row[EXPECT_TABLE_COLUMNS["passed"]])


def _nef_negative(row) -> bool:
    return str(row[NEF_TABLE_COLUMNS["value"]]).startswith("-")


def _summary_failed(row) -> bool:
    return row["item"] == "passed" and row["value"] == "false"


def report_sheets(report: Report) -> dict:
    """sheet 键 → (DataFrame, 标红规则)。空表不写。"""
    sheets = {
        "summary": (summary_table(report), _summary_failed),
        "chains": (chain_table(report), None),
        "discrepancies": (discrepancy_table(report), None),
        "nef": (nef_table(report), _nef_negative),
        "pi1": (pi1_trace_table(report), None),
        "expectations": (expectation_table(report), _expectation_failed),
    }
    return {key: value for key, value in sheets.items() if key == "summary" or not value[0].empty}


def write_report_workbook(reports: Sequence[Report], path: Union[str, Path]) -> Path:
    """
    把一个或多个报告写进同一个工作簿，每张表一个 sheet。
    多个报告时 sheet 名前加序号。
    """
    path = Path(path)
    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        for index, report in enumerate(reports, start=1):
            prefix = f"{index}-" if len(reports) > 1 else ""
            for key, (df, failing) in report_sheets(report).items():
                sheet_name = (prefix + SHEET_NAMES[key])[:31]
                df.to_excel(writer, sheet_name=sheet_name, index=False)
                ws = writer.book[sheet_name]
                for cell in ws[1]:
                    cell.font = HEADER_FONT
                adjust_column_width(ws, df)
                if failing is not None:
                    highlight_rows(ws, df, failing)
    return path
