"""CSV-backed single-sheet workbooks.

Cells starting with '=' are formulas; other cells become numbers, ISO dates,
or text.  Formula parse failures are recorded on the cell as error values so
a bad formula never aborts a workbook load.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Union

from ..daycount import parse_date
from .ast import FormulaNode, column_to_index, index_to_column
from .parser import ParseError, parse

__all__ = [
    "MAX_CELLS",
    "ErrorKind",
    "ErrorValue",
    "CellValue",
    "Cell",
    "Sheet",
    "parse_address",
    "format_address",
    "load_workbook",
]

MAX_CELLS = 1_000_000

_ADDRESS_RE = re.compile(r"([A-Za-z]{1,3})([1-9][0-9]*)$")
_DATE_SHAPE_RE = re.compile(r"\d{4}-\d{2}-\d{2}$")


class ErrorKind(str, Enum):
    PARSE = "parse"
    CYCLE = "cycle"
    PROPAGATED = "propagated"
    UNKNOWN_FUNCTION = "unknown_function"
    ARGUMENT = "argument"
    DIV0 = "div0"
    VALUE = "value"


@dataclass(frozen=True)
class ErrorValue:
    kind: ErrorKind
    message: str

    @property
    def code(self) -> str:
        return f"#{self.kind.name}!"

    def __str__(self) -> str:
        return f"{self.code} {self.message}"


CellValue = Union[float, dt.date, str, ErrorValue]


@dataclass(frozen=True)
class Cell:
    """One populated cell.  Exactly one of literal/formula/error is set."""

    address: str
    column: str
    row: int
    raw: str
    literal: float | dt.date | str | None = None
    formula: FormulaNode | None = None
    error: ErrorValue | None = None

    @property
    def is_formula(self) -> bool:
        return self.raw.startswith("=")


def parse_address(address: str) -> tuple[str, int]:
    """Split "B3" into ("B", 3)."""
    match = _ADDRESS_RE.fullmatch(address.strip())
    if not match:
        raise ValueError(f"not a cell address: {address!r}")
    return match.group(1).upper(), int(match.group(2))


def format_address(column: str, row: int) -> str:
    return f"{column}{row}"


def _classify_literal(text: str) -> float | dt.date | str:
    try:
        value = float(text)
        if math.isfinite(value):
            return value
    except ValueError:
        pass
    if _DATE_SHAPE_RE.fullmatch(text):
        try:
            return parse_date(text)
        except ValueError:
            pass
    return text


class Sheet:
    """Immutable cell grid plus a value cache filled during evaluation."""

    def __init__(self, cells: dict[str, Cell], n_rows: int, n_cols: int, name: str = "sheet"):
        self.cells = cells
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.name = name
        self._values: dict[str, CellValue] = {}

    @classmethod
    def from_rows(cls, rows: list[list[str]], name: str = "sheet") -> "Sheet":
        cells: dict[str, Cell] = {}
        n_cols = 0
        scanned = 0
        for row_index, row in enumerate(rows, start=1):
            n_cols = max(n_cols, len(row))
            scanned += len(row)
            if scanned > MAX_CELLS:
                raise ValueError(f"workbook exceeds {MAX_CELLS} cells")
            for col_index, raw in enumerate(row, start=1):
                text = raw.strip()
                if not text:
                    continue
                column = index_to_column(col_index)
                address = format_address(column, row_index)
                if text.startswith("="):
                    try:
                        node = parse(text)
                        cell = Cell(address, column, row_index, text, formula=node)
                    except ParseError as exc:
                        error = ErrorValue(ErrorKind.PARSE, str(exc))
                        cell = Cell(address, column, row_index, text, error=error)
                else:
                    cell = Cell(address, column, row_index, text, literal=_classify_literal(text))
                cells[address] = cell
        return cls(cells, n_rows=len(rows), n_cols=n_cols, name=name)

    def cell(self, address: str) -> Cell | None:
        column, row = parse_address(address)
        return self.cells.get(format_address(column, row))

    def addresses(self) -> Iterator[str]:
        """Populated addresses in row-major order."""
        ordered = sorted(
            self.cells.values(), key=lambda c: (c.row, column_to_index(c.column))
        )
        for cell in ordered:
            yield cell.address

    def range_addresses(self, ref) -> Iterator[str]:
        """Populated addresses inside a RangeRef, row-major."""
        col_lo = column_to_index(ref.start.column)
        col_hi = column_to_index(ref.end.column)
        for row in range(ref.start.row, ref.end.row + 1):
            for col in range(col_lo, col_hi + 1):
                address = format_address(index_to_column(col), row)
                if address in self.cells:
                    yield address

    def value(self, address: str) -> CellValue:
        from .evaluator import _Evaluator

        column, row = parse_address(address)
        return _Evaluator(self).cell_value(format_address(column, row))

    def evaluate_all(self) -> dict[str, CellValue]:
        """Evaluate every populated cell; returns address -> value."""
        return {address: self.value(address) for address in self.addresses()}


def load_workbook(path: str | Path) -> Sheet:
    """Load a CSV grid; row 1 is the first CSV record, column A the first field."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    return Sheet.from_rows(rows, name=path.stem)
