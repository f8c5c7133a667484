"""Experiment reports and their JSON, CSV and PDF renderings."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
from xml.sax.saxutils import escape

import numpy as np
from reportlab.lib.colors import Color, black, white
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from . import __version__
from .errors import InputError

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "pdf")

HEADER_COLOR = Color(0.18, 0.24, 0.36)
STRIPE_COLOR = Color(0.95, 0.96, 0.98)


def encode(value: Any) -> Any:
    """JSON-ready form: complex numbers become ``{"re", "im"}``, non-finite floats become strings."""
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": encode(value.real), "im": encode(value.imag)}
    if isinstance(value, np.ndarray):
        return [encode(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    raise InputError(f"cannot serialise {type(value).__name__} into a report")


def _is_finite(value: Any) -> bool:
    if isinstance(value, (float, np.floating)):
        return math.isfinite(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return math.isfinite(value.real) and math.isfinite(value.imag)
    return True


@dataclass
class Report:
    """Result of one command.

    ``increments`` holds last-window increments of windowed quantities and
    ``flags`` the quantities reported as divergent. ``tables`` are
    plot-ready row lists. ``timing`` is wall-clock seconds and is written
    only when asked for, so that reports stay reproducible.
    """

    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)
    increments: Dict[str, float] = field(default_factory=dict)
    flags: Dict[str, str] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    timing: Optional[float] = None
    version: str = __version__

    def add(self, name: str, value: Any, increment: Optional[float] = None, converged: Optional[bool] = None) -> None:
        """Record a value; non-finite values and failed convergence are flagged."""
        self.values[name] = value
        if increment is not None:
            self.increments[name] = increment
        if converged is False:
            self.flags[name] = "divergent"
        elif not _is_finite(value):
            self.flags[name] = "non-finite"

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data = {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "parameters": encode(self.parameters),
            "values": encode(self.values),
            "increments": encode(self.increments),
            "flags": dict(self.flags),
            "tables": encode(self.tables),
            "version": self.version,
        }
        if include_timing and self.timing is not None:
            data["timing"] = self.timing
        return data

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    @property
    def ok(self) -> bool:
        return not self.flags


def _scalar_rows(report: Report) -> List[List[Any]]:
    rows = []
    for name in sorted(report.values):
        value = report.values[name]
        if isinstance(value, (list, tuple, dict, np.ndarray)):
            continue
        if isinstance(value, (complex, np.complexfloating)):
            re, im = float(value.real), float(value.imag)
        elif isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
            re, im = float(value), 0.0
        else:
            rows.append([name, str(value), "", report.flags.get(name, "")])
            continue
        rows.append([name, re, im, report.flags.get(name, "")])
    return rows


def write_json(report: Report, path: Union[str, Path], include_timing: bool = False) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(report.to_json(include_timing))
    return p


def write_csv(report: Report, path: Union[str, Path], include_timing: bool = False) -> List[Path]:
    """Scalars to ``path`` as ``name,re,im,flag``; each table to ``<stem>_<table>.csv``."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    written = [p]
    with p.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "re", "im", "flag"])
        writer.writerows(_scalar_rows(report))
        if include_timing and report.timing is not None:
            writer.writerow(["timing", report.timing, "", ""])
    for name in sorted(report.tables):
        rows = report.tables[name]
        table_path = p.with_name(f"{p.stem}_{name}.csv")
        with table_path.open("w", newline="") as fh:
            header = list(rows[0].keys()) if rows else []
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([row[h] for h in header])
        written.append(table_path)
    return written


class ReportRenderer:
    """Lays a report out as a PDF with a title block and striped tables."""

    def __init__(self, max_table_rows: int = 200):
        self.max_table_rows = max_table_rows
        self.styles = self._create_styles()

    def _create_styles(self) -> Dict[str, ParagraphStyle]:
        base_styles = getSampleStyleSheet()
        return {
            'Title': ParagraphStyle(
                'ReportTitle',
                parent=base_styles['Heading1'],
                fontSize=18,
                spaceAfter=4,
                textColor=HEADER_COLOR,
            ),
            'Meta': ParagraphStyle(
                'ReportMeta',
                parent=base_styles['Normal'],
                fontSize=9,
                textColor=Color(0.35, 0.35, 0.35),
                spaceAfter=10,
            ),
            'SectionHeader': ParagraphStyle(
                'ReportSection',
                parent=base_styles['Heading2'],
                fontSize=12,
                spaceBefore=10,
                spaceAfter=4,
                textColor=HEADER_COLOR,
            ),
            'Cell': ParagraphStyle(
                'ReportCell',
                parent=base_styles['Normal'],
                fontSize=8,
                leading=10,
            ),
            'HeaderCell': ParagraphStyle(
                'ReportHeaderCell',
                parent=base_styles['Normal'],
                fontSize=8,
                leading=10,
                textColor=white,
            ),
        }

    def _table(self, rows: List[List[Any]], header: List[str]) -> Table:
        data = [[Paragraph(f"<b>{h}</b>", self.styles['HeaderCell']) for h in header]]
        for row in rows:
            data.append([Paragraph(self._format(v), self.styles['Cell']) for v in row])
        table = Table(data, repeatRows=1)
        commands = [
            ('BACKGROUND', (0, 0), (-1, 0), HEADER_COLOR),
            ('TEXTCOLOR', (0, 0), (-1, 0), white),
            ('VALIGN', (0, 0), (-1, -1), 'MIDDLE'),
            ('LEFTPADDING', (0, 0), (-1, -1), 4),
            ('RIGHTPADDING', (0, 0), (-1, -1), 4),
            ('TOPPADDING', (0, 0), (-1, -1), 2),
            ('BOTTOMPADDING', (0, 0), (-1, -1), 2),
            ('LINEBELOW', (0, 0), (-1, 0), 0.5, black),
        ]
        for i in range(2, len(data), 2):
            commands.append(('BACKGROUND', (0, i), (-1, i), STRIPE_COLOR))
        table.setStyle(TableStyle(commands))
        return table

    @staticmethod
    def _format(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.10g}"
        return escape(str(value))

    def build_story(self, report: Report, include_timing: bool = False) -> List:
        meta = f"version {report.version}, schema {SCHEMA_VERSION}"
        if include_timing and report.timing is not None:
            meta += f", wall-clock {report.timing:.3f} s"
        story: List = [
            Paragraph(f"bernstein-lab report: {report.command}", self.styles['Title']),
            Paragraph(meta, self.styles['Meta']),
        ]
        if report.parameters:
            story.append(Paragraph("Parameters", self.styles['SectionHeader']))
            params = [[k, json.dumps(encode(v))] for k, v in sorted(report.parameters.items())]
            story.append(self._table(params, ["parameter", "value"]))
        story.append(Paragraph("Values", self.styles['SectionHeader']))
        story.append(self._table(_scalar_rows(report), ["name", "re", "im", "flag"]))
        if report.increments:
            story.append(Paragraph("Convergence increments", self.styles['SectionHeader']))
            story.append(self._table([[k, v] for k, v in sorted(report.increments.items())], ["name", "increment"]))
        for name in sorted(report.tables):
            rows = report.tables[name]
            if not rows:
                continue
            header = list(rows[0].keys())
            story.append(Spacer(1, 6))
            story.append(Paragraph(f"Table: {name}", self.styles['SectionHeader']))
            shown = rows[:self.max_table_rows]
            story.append(self._table([[json.dumps(encode(r[h])) if isinstance(r[h], (dict, list)) else r[h]
                                       for h in header] for r in shown], header))
            if len(rows) > len(shown):
                story.append(Paragraph(f"{len(rows) - len(shown)} more rows in the CSV output", self.styles['Meta']))
        return story

    def render(self, report: Report, path: Union[str, Path], include_timing: bool = False) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        margins = 0.75 * inch
        doc = SimpleDocTemplate(
            str(p),
            pagesize=letter,
            topMargin=margins,
            bottomMargin=margins,
            leftMargin=margins,
            rightMargin=margins,
            title=f"bernstein-lab {report.command}",
        )
        doc.build(self.build_story(report, include_timing))
        return p


def write_pdf(report: Report, path: Union[str, Path], include_timing: bool = False) -> Path:
    return ReportRenderer().render(report, path, include_timing)


def write_report(
    report: Report, path: Union[str, Path], fmt: str = "json", include_timing: bool = False
) -> List[Path]:
    """Write ``report`` as ``fmt``; wall-clock time is included only on request."""
    if fmt not in FORMATS:
        raise InputError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
    if fmt == "json":
        return [write_json(report, path, include_timing)]
    if fmt == "csv":
        return write_csv(report, path, include_timing)
    return [write_pdf(report, path, include_timing)]
