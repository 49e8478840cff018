"""Benchmark harness: canned suites, reports, golden-table comparison."""

from .report import (SCHEMA_VERSION, compare, load_golden, load_report,
                     new_report, write_csv, write_json)
from .suite import SUITES, run_suite

__all__ = ["SCHEMA_VERSION", "SUITES", "compare", "load_golden", "load_report",
           "new_report", "run_suite", "write_csv", "write_json"]
