"""
Report Exporter for the UC-CET benchmark harness
Writes solve results, traces, tightness and bench tables to JSON, CSV and Excel
"""

import json
import logging
import math
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter
from openpyxl.utils.dataframe import dataframe_to_rows

from .config import Config

FORMATS = ('json', 'csv', 'xlsx')

GOOD_FILL = PatternFill(start_color="C6EFCE", end_color="C6EFCE", fill_type="solid")  # light green
WARN_FILL = PatternFill(start_color="FFEB9C", end_color="FFEB9C", fill_type="solid")  # light yellow
BAD_FILL = PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid")  # light red


def _plain(value):
    """JSON-safe value: numpy scalars unwrapped, NaN and inf as null."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportExporter:
    """Exports reports; one file per table, named after the report."""

    def __init__(self, output_dir: Optional[Path] = None):
        self.logger = logging.getLogger(__name__)
        self.output_dir = Path(output_dir or Config.OUTPUT_DIR)

    def _path(self, name: str, suffix: str, path: Optional[Path]) -> Path:
        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            return path
        self.output_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return self.output_dir / f"{name}_{timestamp}.{suffix}"

    def export_report(self, report: Dict, fmt: str = 'json', name: str = 'report',
                      tables: Optional[Dict[str, pd.DataFrame]] = None, path: Optional[Path] = None) -> Path:
        """Write a report dict (json) or its tables (csv/xlsx)."""
        if fmt not in FORMATS:
            raise ValueError(f"unknown output format {fmt!r} (choose from {', '.join(FORMATS)})")
        tables = tables or {}

        if fmt == 'json':
            output_path = self._path(name, 'json', path)
            payload = dict(report)
            for key, frame in tables.items():
                payload[key] = frame.to_dict(orient='records')
            with open(output_path, 'w', encoding='utf-8') as f:
                json.dump(_plain(payload), f, indent=2)
        elif fmt == 'csv':
            output_path = self._export_csv(report, tables, name, path)
        else:
            output_path = self._path(name, 'xlsx', path)
            self.export_excel(report, tables, output_path)

        self.logger.info(f"Exported {name} to {output_path}")
        return output_path

    def _export_csv(self, report: Dict, tables: Dict[str, pd.DataFrame], name: str,
                    path: Optional[Path]) -> Path:
        """Main table goes to the requested path; extra tables get a suffixed sibling file."""
        if not tables:
            scalars = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
            tables = {'summary': pd.DataFrame([scalars])}
        first = None
        for key, frame in tables.items():
            if first is None:
                output_path = self._path(name, 'csv', path)
                first = output_path
            else:
                output_path = first.with_name(f"{first.stem}_{key}.csv")
            frame.to_csv(output_path, index=False)
        return first

    def export_excel(self, report: Dict, tables: Dict[str, pd.DataFrame], output_path: Path):
        """Workbook with one formatted sheet per table and a summary sheet."""
        wb = Workbook()
        wb.remove(wb.active)
        for key, frame in tables.items():
            self._add_table_sheet(wb, key, frame)
        self._add_summary_sheet(wb, report)
        wb.save(output_path)

    def _add_table_sheet(self, wb: Workbook, title: str, df: pd.DataFrame):
        ws = wb.create_sheet(title[:31])
        n_cols = max(1, len(df.columns))

        # Title row
        last_col = get_column_letter(n_cols)
        ws.merge_cells(f'A1:{last_col}1')
        title_cell = ws['A1']
        title_cell.value = title
        title_cell.font = Font(size=14, bold=True, color="FFFFFF")
        title_cell.fill = PatternFill(start_color="2E75B6", end_color="2E75B6", fill_type="solid")
        title_cell.alignment = Alignment(horizontal="center", vertical="center")

        ws.merge_cells(f'A2:{last_col}2')
        ws['A2'].value = f"Generated on {datetime.now().strftime('%Y-%m-%d %H:%M:%S')} | Rows: {len(df)}"
        ws['A2'].font = Font(size=11, italic=True)

        ws.append([])
        # missing values as empty cells
        df = df.astype(object).where(pd.notna(df), None)
        for r in dataframe_to_rows(df, index=False, header=True):
            ws.append(r)

        header_row = 4
        header_fill = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
        for col in range(1, n_cols + 1):
            cell = ws.cell(row=header_row, column=col)
            cell.fill = header_fill
            cell.font = Font(color="FFFFFF", bold=True)
            cell.alignment = Alignment(horizontal="center", vertical="center", wrap_text=True)
        ws.freeze_panes = 'A5'

        thin = Side(style='thin')
        border = Border(left=thin, right=thin, top=thin, bottom=thin)
        marks = [i + 1 for i, c in enumerate(df.columns) if str(c).endswith('_mark')]
        for row in range(header_row, ws.max_row + 1):
            for col in range(1, n_cols + 1):
                cell = ws.cell(row=row, column=col)
                cell.border = border
                if row > header_row and col in marks:
                    cell.alignment = Alignment(horizontal="center")
                    if cell.value in (None, ''):
                        cell.fill = GOOD_FILL
                    elif cell.value == '*':
                        cell.fill = WARN_FILL
                    else:
                        cell.fill = BAD_FILL

        for col_idx in range(1, n_cols + 1):
            width = max((len(str(ws.cell(row=r, column=col_idx).value or ''))
                         for r in range(header_row, ws.max_row + 1)), default=8)
            ws.column_dimensions[get_column_letter(col_idx)].width = min(width + 2, 40)

    def _add_summary_sheet(self, wb: Workbook, report: Dict):
        ws = wb.create_sheet("Summary")
        ws['A1'] = "UC-CET Report Summary"
        ws['A1'].font = Font(size=16, bold=True)
        ws.merge_cells('A1:C1')

        row = 3
        for label, value in report.items():
            if isinstance(value, (dict, list)):
                continue
            ws[f'A{row}'] = str(label)
            ws[f'B{row}'] = _plain(value)
            ws[f'A{row}'].font = Font(bold=True)
            row += 1

        ws.column_dimensions['A'].width = 30
        ws.column_dimensions['B'].width = 25
