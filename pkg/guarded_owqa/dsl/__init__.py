from .parser import parse_file, parse_program
from .render import render_program
from .report import Report, emit_report

__all__ = ["parse_file", "parse_program", "render_program", "Report", "emit_report"]
