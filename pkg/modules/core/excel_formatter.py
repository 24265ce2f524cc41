"""
Excel Formatter Module
Writes report frames to a styled xlsx workbook
"""
from typing import Any, Dict, List, Sequence, Tuple

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Font, PatternFill, Alignment, Border, Side

MAX_COLUMN_WIDTH = 50


class ExcelFormatter:
    """Excel formatting utilities for corpus reports"""

    def __init__(self):
        self.header_font = Font(bold=True, color="FFFFFF")
        self.header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        self.header_alignment = Alignment(horizontal="center", vertical="center")
        self.border = Border(
            left=Side(style="thin"),
            right=Side(style="thin"),
            top=Side(style="thin"),
            bottom=Side(style="thin")
        )

    def apply_excel_formatting(self, workbook: Workbook, worksheet_name: str = None) -> None:
        """
        Style the header row, border every data cell and size the columns

        Args:
            workbook: Openpyxl workbook object
            worksheet_name: Name of worksheet to format (None for active)
        """
        ws = workbook[worksheet_name] if worksheet_name else workbook.active

        if ws.max_row > 0:
            for cell in ws[1]:
                cell.font = self.header_font
                cell.fill = self.header_fill
                cell.alignment = self.header_alignment
                cell.border = self.border

        for row in ws.iter_rows(min_row=2, max_row=ws.max_row, max_col=ws.max_column):
            for cell in row:
                cell.border = self.border

        ws.freeze_panes = "A2"
        self._auto_adjust_columns(ws)

    def _auto_adjust_columns(self, worksheet) -> None:
        """Auto-adjust column widths based on content"""
        for column in worksheet.columns:
            column_letter = column[0].column_letter
            max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            worksheet.column_dimensions[column_letter].width = min(max_length + 2, MAX_COLUMN_WIDTH)

    def create_summary_sheet(self, workbook: Workbook, summary: Sequence[Tuple[str, Any]],
                             sheet_name: str = "Summary") -> None:
        """
        Create a key/value summary sheet placed first in the workbook

        Args:
            workbook: Openpyxl workbook object
            summary: (label, value) rows; a row with an empty value is a section title
            sheet_name: Name of summary sheet
        """
        ws = workbook.create_sheet(title=sheet_name, index=0)
        rows: List[Tuple[str, Any]] = [("Analysis Summary", "")] + list(summary)

        for row_idx, (key, value) in enumerate(rows, 1):
            ws.cell(row=row_idx, column=1, value=key)
            ws.cell(row=row_idx, column=2, value=value)
            if row_idx > 1 and key and value == "":
                ws.cell(row_idx, 1).font = Font(bold=True)

        ws.cell(1, 1).font = Font(bold=True, size=14)
        self._auto_adjust_columns(ws)

    def save_formatted_excel(self, frames: Dict[str, pd.DataFrame], file_path: str,
                             summary: Sequence[Tuple[str, Any]] = ()) -> None:
        """
        Save report frames, one formatted sheet each, plus a summary sheet

        Args:
            frames: Sheet name -> frame, written in insertion order
            file_path: Output file path
            summary: Rows of the summary sheet
        """
        with pd.ExcelWriter(file_path, engine='openpyxl') as writer:
            for sheet_name, frame in frames.items():
                frame.to_excel(writer, sheet_name=sheet_name, index=False)
            workbook = writer.book

            for sheet_name in frames:
                self.apply_excel_formatting(workbook, sheet_name)

            self.create_summary_sheet(workbook, summary)
