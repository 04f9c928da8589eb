"""Export reproduced tables to text, CSV and PDF."""

import csv
import io
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from reportlab.lib import colors
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from src.config import Config
from src.schemas import ReproducedTable, TableExportOptions

logger = logging.getLogger(__name__)


class TableExporter:
    """Export reproduced tables to various formats."""

    def __init__(self, exports_dir: Optional[Path] = None):
        """Initialize exporter.

        Args:
            exports_dir: Directory for files written without an explicit path
        """
        self.exports_dir = Path(exports_dir) if exports_dir else Config.DATA_DIR / "exports"
        self.exports_dir.mkdir(parents=True, exist_ok=True)

    def export(
        self,
        table: ReproducedTable,
        options: TableExportOptions,
        path: Optional[Path] = None
    ) -> Path:
        """Export table to specified format.

        Args:
            table: Table to export
            options: Export options
            path: Target file; generated in exports_dir when omitted

        Returns:
            Path to exported file
        """
        if options.format == "text":
            target = path or self.exports_dir / self._generate_filename(table, "txt")
            Path(target).write_text(self.render_text(table, options), encoding="utf-8")
            logger.info(f"Text table exported: {target}")
            return Path(target)
        elif options.format == "csv":
            return self.export_csv(table, options, path)
        elif options.format == "pdf":
            return self.export_pdf(table, options, path)
        else:
            raise ValueError(f"Unsupported format: {options.format}")

    def render_text(self, table: ReproducedTable, options: Optional[TableExportOptions] = None) -> str:
        """Aligned plain-text rendering."""
        include_footnotes = options.include_footnotes if options else True
        widths = [len(h) for h in table.headers]
        for row in table.rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))

        def line(cells: List[str]) -> str:
            return "  ".join(cell.rjust(widths[i]) for i, cell in enumerate(cells))

        out = [f"Table {table.which}: {table.title}", line(table.headers), "  ".join("-" * w for w in widths)]
        out.extend(line(row) for row in table.rows)
        if include_footnotes:
            out.extend(f"* {note}" for note in table.footnotes)
        return "\n".join(out) + "\n"

    def render_csv(self, table: ReproducedTable, options: Optional[TableExportOptions] = None) -> str:
        """CSV with '.' decimals and no thousands separators; footnotes as '#' lines."""
        include_footnotes = options.include_footnotes if options else True
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.headers)
        writer.writerows(table.rows)
        if include_footnotes:
            for note in table.footnotes:
                buffer.write(f"# {note}\n")
        return buffer.getvalue()

    def export_csv(
        self,
        table: ReproducedTable,
        options: TableExportOptions,
        path: Optional[Path] = None
    ) -> Path:
        """Export to CSV format."""
        filepath = Path(path) if path else self.exports_dir / self._generate_filename(table, "csv")
        filepath.parent.mkdir(parents=True, exist_ok=True)
        filepath.write_text(self.render_csv(table, options), encoding="utf-8")
        logger.info(f"CSV exported: {filepath}")
        return filepath

    def export_pdf(
        self,
        table: ReproducedTable,
        options: TableExportOptions,
        path: Optional[Path] = None
    ) -> Path:
        """Export to PDF format.

        Args:
            table: Table to export
            options: Export options
            path: Target file

        Returns:
            Path to PDF file
        """
        logger.info(f"Exporting table {table.which} to PDF")

        filepath = Path(path) if path else self.exports_dir / self._generate_filename(table, "pdf")
        filepath.parent.mkdir(parents=True, exist_ok=True)

        doc = SimpleDocTemplate(
            str(filepath),
            pagesize=letter,
            rightMargin=72,
            leftMargin=72,
            topMargin=72,
            bottomMargin=18
        )

        story = []
        styles = getSampleStyleSheet()

        title_style = ParagraphStyle(
            'TableTitle',
            parent=styles['Title'],
            fontSize=16,
            textColor=colors.HexColor('#1a1a1a'),
            spaceAfter=20,
            alignment=1  # Center
        )

        story.append(Paragraph(f"Table {table.which}: {table.title}", title_style))
        story.append(Spacer(1, 0.2*inch))

        data = [table.headers] + table.rows
        pdf_table = Table(data, repeatRows=1)
        pdf_table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#0066cc')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, -1), 'RIGHT'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTNAME', (0, 1), (-1, -1), 'Courier'),
            ('FONTSIZE', (0, 0), (-1, -1), 9),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 8),
            ('GRID', (0, 0), (-1, -1), 0.5, colors.grey)
        ]))
        story.append(pdf_table)

        if options.include_footnotes and table.footnotes:
            story.append(Spacer(1, 0.2*inch))
            for note in table.footnotes:
                story.append(Paragraph(f"* {note}", styles['Normal']))

        footer_style = ParagraphStyle(
            'Footer',
            parent=styles['Normal'],
            fontSize=8,
            textColor=colors.grey,
            alignment=1
        )
        story.append(Spacer(1, 0.5*inch))
        story.append(Paragraph(f"Generated by girr on {datetime.now().strftime('%B %d, %Y %H:%M')}", footer_style))

        doc.build(story)

        logger.info(f"PDF exported: {filepath}")
        return filepath

    def _generate_filename(self, table: ReproducedTable, extension: str) -> str:
        """Generate filename for export.

        Args:
            table: Table being exported
            extension: File extension

        Returns:
            Filename string
        """
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"table{table.which}_{timestamp}.{extension}"
