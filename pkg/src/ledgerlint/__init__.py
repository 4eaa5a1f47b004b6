"""Financial calculations with twin compat/exact modes plus a workbook audit engine."""

__version__ = "0.1.0"
