"""Formula evaluation over a sheet: reference resolution, cycle detection,
operator semantics, and dispatch into the financial function catalog.

Evaluation is total: every failure becomes an ErrorValue, never an exception.
Errors reached through a cell reference surface as PROPAGATED at the
referring cell; only the cells actually on a reference cycle are CYCLE.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from ..cashflow import CashFlowSeries, npv_legacy, pmt, xnpv
from ..daycount import DayCountBasis, days_between
from ..depreciation import DepreciationSpec, PrecisionMode, db_period, sln
from ..rates import accrint, effective_rate, intrate, nominal_rate
from .ast import (
    Binary,
    Call,
    CellRef,
    EmptyArg,
    FormulaNode,
    NumberLit,
    PercentLit,
    RangeRef,
    TextLit,
    Unary,
    format_number,
)
from .sheet import CellValue, ErrorKind, ErrorValue, Sheet

__all__ = ["evaluate", "FUNCTION_CATALOG", "BASIS_CODES"]

BASIS_CODES = {
    0: DayCountBasis.US_30_360,
    1: DayCountBasis.ACTUAL_ACTUAL,
    2: DayCountBasis.ACTUAL_360,
    3: DayCountBasis.ACTUAL_365,
    4: DayCountBasis.EUR_30_360,
}


def _type_name(value: CellValue) -> str:
    if isinstance(value, float):
        return "number"
    if isinstance(value, dt.date):
        return "date"
    return "text"


def _as_text(value: float | dt.date | str) -> str:
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, dt.date):
        return value.isoformat()
    return value


class _Evaluator:
    def __init__(self, sheet: Sheet):
        self.sheet = sheet
        self.cache = sheet._values
        self.stack: list[str] = []

    # cell resolution

    def cell_value(self, address: str) -> CellValue:
        if address in self.cache:
            return self.cache[address]
        cell = self.sheet.cells.get(address)
        if cell is None:
            return 0.0  # empty cells read as 0
        if cell.error is not None:
            self.cache[address] = cell.error
            return cell.error
        if cell.formula is None:
            self.cache[address] = cell.literal
            return cell.literal
        if address in self.stack:
            members = self.stack[self.stack.index(address):]
            path = " -> ".join(members + [address])
            error = ErrorValue(ErrorKind.CYCLE, f"circular reference: {path}")
            for member in members:
                self.cache[member] = error
            return error
        self.stack.append(address)
        try:
            result = self.eval_node(cell.formula)
        finally:
            self.stack.pop()
        if address in self.cache:  # marked as a cycle member while recursing
            return self.cache[address]
        self.cache[address] = result
        return result

    def range_addresses(self, ref: RangeRef) -> Iterator[str]:
        return self.sheet.range_addresses(ref)

    # expression evaluation

    def eval_node(self, node: FormulaNode) -> CellValue:
        if isinstance(node, NumberLit):
            return node.value
        if isinstance(node, PercentLit):
            return node.value / 100
        if isinstance(node, TextLit):
            return node.value
        if isinstance(node, CellRef):
            value = self.cell_value(node.address)
            if isinstance(value, ErrorValue):
                return ErrorValue(
                    ErrorKind.PROPAGATED, f"error propagated from {node.address}"
                )
            return value
        if isinstance(node, RangeRef):
            return ErrorValue(
                ErrorKind.VALUE,
                f"range {node.start.address}:{node.end.address} used as a scalar",
            )
        if isinstance(node, Unary):
            value = self.eval_node(node.child)
            if isinstance(value, ErrorValue):
                return value
            if isinstance(value, float):
                return -value
            return ErrorValue(
                ErrorKind.VALUE, f"cannot negate a {_type_name(value)}"
            )
        if isinstance(node, Binary):
            left = self.eval_node(node.left)
            if isinstance(left, ErrorValue):
                return left
            right = self.eval_node(node.right)
            if isinstance(right, ErrorValue):
                return right
            return self._binary(node.op, left, right)
        if isinstance(node, Call):
            return self._call(node)
        if isinstance(node, EmptyArg):
            return ErrorValue(ErrorKind.ARGUMENT, "empty argument slot outside a call")
        raise TypeError(f"not a formula node: {node!r}")

    def _binary(self, op: str, left: CellValue, right: CellValue) -> CellValue:
        if op == "&":
            return _as_text(left) + _as_text(right)
        if op in ("=", "<>", "<", ">", "<=", ">="):
            return self._compare(op, left, right)
        both_numbers = isinstance(left, float) and isinstance(right, float)
        if op == "-" and isinstance(left, dt.date) and isinstance(right, dt.date):
            return float((left - right).days)
        if not both_numbers:
            return ErrorValue(
                ErrorKind.VALUE,
                f"cannot apply {op!r} to {_type_name(left)} and {_type_name(right)}",
            )
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0.0:
                return ErrorValue(ErrorKind.DIV0, "division by zero")
            return left / right
        if op == "^":
            try:
                result = left ** right
            except ZeroDivisionError:
                return ErrorValue(ErrorKind.DIV0, "zero raised to a negative power")
            except OverflowError:
                return ErrorValue(ErrorKind.VALUE, "numeric overflow in '^'")
            if isinstance(result, complex):
                return ErrorValue(
                    ErrorKind.VALUE, "negative base with fractional exponent"
                )
            return result
        raise ValueError(f"unknown operator {op!r}")

    def _compare(self, op: str, left: CellValue, right: CellValue) -> CellValue:
        same_kind = (
            (isinstance(left, float) and isinstance(right, float))
            or (isinstance(left, str) and isinstance(right, str))
            or (isinstance(left, dt.date) and isinstance(right, dt.date))
        )
        if not same_kind:
            return ErrorValue(
                ErrorKind.VALUE,
                f"cannot compare {_type_name(left)} with {_type_name(right)}",
            )
        if op == "=":
            outcome = left == right
        elif op == "<>":
            outcome = left != right
        elif op == "<":
            outcome = left < right
        elif op == ">":
            outcome = left > right
        elif op == "<=":
            outcome = left <= right
        else:
            outcome = left >= right
        return 1.0 if outcome else 0.0

    # function dispatch

    def _call(self, node: Call) -> CellValue:
        name = node.name.upper()
        spec = FUNCTION_CATALOG.get(name)
        if spec is None:
            return ErrorValue(ErrorKind.UNKNOWN_FUNCTION, f"unknown function {name}")
        count = len(node.args)
        if count < spec.min_args or (spec.max_args is not None and count > spec.max_args):
            upper = "or more" if spec.max_args is None else f"to {spec.max_args}"
            return ErrorValue(
                ErrorKind.ARGUMENT,
                f"{name} takes {spec.min_args} {upper} arguments, got {count}",
            )
        return spec.handler(self, node.args)

    def scalar(self, node: FormulaNode, fname: str, param: str) -> CellValue:
        if isinstance(node, EmptyArg):
            return ErrorValue(ErrorKind.ARGUMENT, f"{fname}: argument '{param}' is required")
        if isinstance(node, RangeRef):
            return ErrorValue(ErrorKind.ARGUMENT, f"{fname}: '{param}' cannot be a range")
        return self.eval_node(node)

    def number(self, node: FormulaNode, fname: str, param: str) -> float | ErrorValue:
        value = self.scalar(node, fname, param)
        if isinstance(value, (ErrorValue, float)):
            return value
        return ErrorValue(
            ErrorKind.ARGUMENT,
            f"{fname}: '{param}' must be a number, got {_type_name(value)}",
        )

    def integer(self, node: FormulaNode, fname: str, param: str) -> int | ErrorValue:
        value = self.number(node, fname, param)
        if isinstance(value, ErrorValue):
            return value
        if value != int(value):
            return ErrorValue(
                ErrorKind.ARGUMENT, f"{fname}: '{param}' must be an integer, got {value}"
            )
        return int(value)

    def date(self, node: FormulaNode, fname: str, param: str) -> dt.date | ErrorValue:
        value = self.scalar(node, fname, param)
        if isinstance(value, (ErrorValue, dt.date)):
            return value
        return ErrorValue(
            ErrorKind.ARGUMENT,
            f"{fname}: '{param}' must be a date, got {_type_name(value)}",
        )

    def basis(self, args: Sequence[FormulaNode], index: int, fname: str) -> DayCountBasis | ErrorValue:
        """Optional trailing basis code; omitted or empty defaults to US 30/360."""
        if len(args) <= index or isinstance(args[index], EmptyArg):
            return DayCountBasis.US_30_360
        code = self.integer(args[index], fname, "basis")
        if isinstance(code, ErrorValue):
            return code
        if code not in BASIS_CODES:
            return ErrorValue(
                ErrorKind.ARGUMENT, f"{fname}: basis code must be 0..4, got {code}"
            )
        return BASIS_CODES[code]

    def flatten_numbers(
        self, nodes: Sequence[FormulaNode], fname: str, strict: bool = False
    ) -> list[float] | ErrorValue:
        """Collect numbers from scalars and ranges, row-major within ranges.

        Non-numeric cells inside ranges are skipped unless strict.
        """
        values: list[float] = []
        for node in nodes:
            if isinstance(node, EmptyArg):
                return ErrorValue(ErrorKind.ARGUMENT, f"{fname}: empty argument slot")
            if isinstance(node, RangeRef):
                for address in self.range_addresses(node):
                    value = self.cell_value(address)
                    if isinstance(value, ErrorValue):
                        return ErrorValue(
                            ErrorKind.PROPAGATED,
                            f"{fname}: error propagated from {address}",
                        )
                    if isinstance(value, float):
                        values.append(value)
                    elif strict:
                        return ErrorValue(
                            ErrorKind.ARGUMENT,
                            f"{fname}: {address} holds {_type_name(value)}, expected a number",
                        )
                continue
            value = self.eval_node(node)
            if isinstance(value, ErrorValue):
                return value
            if not isinstance(value, float):
                return ErrorValue(
                    ErrorKind.ARGUMENT,
                    f"{fname}: values must be numbers, got {_type_name(value)}",
                )
            values.append(value)
        return values

    def flatten_dates(self, node: FormulaNode, fname: str, param: str) -> list[dt.date] | ErrorValue:
        if isinstance(node, RangeRef):
            dates: list[dt.date] = []
            for address in self.range_addresses(node):
                value = self.cell_value(address)
                if isinstance(value, ErrorValue):
                    return ErrorValue(
                        ErrorKind.PROPAGATED, f"{fname}: error propagated from {address}"
                    )
                if not isinstance(value, dt.date):
                    return ErrorValue(
                        ErrorKind.ARGUMENT,
                        f"{fname}: {address} holds {_type_name(value)}, expected a date",
                    )
                dates.append(value)
            return dates
        value = self.date(node, fname, param)
        if isinstance(value, ErrorValue):
            return value
        return [value]


# handlers


def _fn_npv(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    rate = ev.number(args[0], "NPV", "rate")
    if isinstance(rate, ErrorValue):
        return rate
    values = ev.flatten_numbers(args[1:], "NPV")
    if isinstance(values, ErrorValue):
        return values
    try:
        return npv_legacy(rate, values)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"NPV: {exc}")


def _fn_xnpv(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    rate = ev.number(args[0], "XNPV", "rate")
    if isinstance(rate, ErrorValue):
        return rate
    values = ev.flatten_numbers(args[1:2], "XNPV", strict=True)
    if isinstance(values, ErrorValue):
        return values
    dates = ev.flatten_dates(args[2], "XNPV", "dates")
    if isinstance(dates, ErrorValue):
        return dates
    try:
        series = CashFlowSeries(values, dates)
        return xnpv(rate, series)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"XNPV: {exc}")


def _fn_db(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    cost = ev.number(args[0], "DB", "cost")
    if isinstance(cost, ErrorValue):
        return cost
    salvage = ev.number(args[1], "DB", "salvage")
    if isinstance(salvage, ErrorValue):
        return salvage
    life = ev.integer(args[2], "DB", "life")
    if isinstance(life, ErrorValue):
        return life
    period = ev.integer(args[3], "DB", "period")
    if isinstance(period, ErrorValue):
        return period
    if len(args) > 4 and not isinstance(args[4], EmptyArg):
        month = ev.integer(args[4], "DB", "month")
        if isinstance(month, ErrorValue):
            return month
    else:
        month = 12
    try:
        spec = DepreciationSpec(cost=cost, salvage=salvage, life=life, month=month)
        return db_period(spec, period, PrecisionMode.COMPAT)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"DB: {exc}")


def _fn_sln(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    cost = ev.number(args[0], "SLN", "cost")
    if isinstance(cost, ErrorValue):
        return cost
    salvage = ev.number(args[1], "SLN", "salvage")
    if isinstance(salvage, ErrorValue):
        return salvage
    life = ev.integer(args[2], "SLN", "life")
    if isinstance(life, ErrorValue):
        return life
    try:
        return sln(cost, salvage, life)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"SLN: {exc}")


def _fn_effect(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    nominal = ev.number(args[0], "EFFECT", "nominal_rate")
    if isinstance(nominal, ErrorValue):
        return nominal
    periods = ev.integer(args[1], "EFFECT", "npery")
    if isinstance(periods, ErrorValue):
        return periods
    try:
        return effective_rate(nominal, periods)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"EFFECT: {exc}")


def _fn_nominal(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    effective = ev.number(args[0], "NOMINAL", "effective_rate")
    if isinstance(effective, ErrorValue):
        return effective
    periods = ev.integer(args[1], "NOMINAL", "npery")
    if isinstance(periods, ErrorValue):
        return periods
    try:
        return nominal_rate(effective, periods)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"NOMINAL: {exc}")


def _fn_intrate(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    settlement = ev.date(args[0], "INTRATE", "settlement")
    if isinstance(settlement, ErrorValue):
        return settlement
    maturity = ev.date(args[1], "INTRATE", "maturity")
    if isinstance(maturity, ErrorValue):
        return maturity
    investment = ev.number(args[2], "INTRATE", "investment")
    if isinstance(investment, ErrorValue):
        return investment
    redemption = ev.number(args[3], "INTRATE", "redemption")
    if isinstance(redemption, ErrorValue):
        return redemption
    basis = ev.basis(args, 4, "INTRATE")
    if isinstance(basis, ErrorValue):
        return basis
    try:
        return intrate(settlement, maturity, investment, redemption, basis)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"INTRATE: {exc}")


def _fn_accrint(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    issue = ev.date(args[0], "ACCRINT", "issue")
    if isinstance(issue, ErrorValue):
        return issue
    settlement = ev.date(args[1], "ACCRINT", "settlement")
    if isinstance(settlement, ErrorValue):
        return settlement
    rate = ev.number(args[2], "ACCRINT", "rate")
    if isinstance(rate, ErrorValue):
        return rate
    par = ev.number(args[3], "ACCRINT", "par")
    if isinstance(par, ErrorValue):
        return par
    basis = ev.basis(args, 4, "ACCRINT")
    if isinstance(basis, ErrorValue):
        return basis
    try:
        return accrint(issue, settlement, rate, par, basis)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"ACCRINT: {exc}")


def _fn_pmt(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    rate = ev.number(args[0], "PMT", "rate")
    if isinstance(rate, ErrorValue):
        return rate
    nper = ev.integer(args[1], "PMT", "nper")
    if isinstance(nper, ErrorValue):
        return nper
    pv = ev.number(args[2], "PMT", "pv")
    if isinstance(pv, ErrorValue):
        return pv
    try:
        return pmt(rate, nper, pv)
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"PMT: {exc}")


def _fn_days360(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    start = ev.date(args[0], "DAYS360", "start_date")
    if isinstance(start, ErrorValue):
        return start
    end = ev.date(args[1], "DAYS360", "end_date")
    if isinstance(end, ErrorValue):
        return end
    european = False
    if len(args) > 2 and not isinstance(args[2], EmptyArg):
        method = ev.number(args[2], "DAYS360", "method")
        if isinstance(method, ErrorValue):
            return method
        european = method != 0.0
    basis = DayCountBasis.EUR_30_360 if european else DayCountBasis.US_30_360
    try:
        return float(days_between(start, end, basis))
    except ValueError as exc:
        return ErrorValue(ErrorKind.ARGUMENT, f"DAYS360: {exc}")


def _fn_sum(ev: _Evaluator, args: Sequence[FormulaNode]) -> CellValue:
    values = ev.flatten_numbers(args, "SUM")
    if isinstance(values, ErrorValue):
        return values
    return float(sum(values))


@dataclass(frozen=True)
class _FunctionSpec:
    name: str
    min_args: int
    max_args: int | None  # None = unlimited
    handler: Callable[[_Evaluator, Sequence[FormulaNode]], CellValue]


FUNCTION_CATALOG = {
    spec.name: spec
    for spec in [
        _FunctionSpec("NPV", 2, None, _fn_npv),
        _FunctionSpec("XNPV", 3, 3, _fn_xnpv),
        _FunctionSpec("DB", 4, 5, _fn_db),
        _FunctionSpec("SLN", 3, 3, _fn_sln),
        _FunctionSpec("EFFECT", 2, 2, _fn_effect),
        _FunctionSpec("NOMINAL", 2, 2, _fn_nominal),
        _FunctionSpec("INTRATE", 4, 5, _fn_intrate),
        _FunctionSpec("ACCRINT", 4, 5, _fn_accrint),
        _FunctionSpec("PMT", 3, 3, _fn_pmt),
        _FunctionSpec("DAYS360", 2, 3, _fn_days360),
        _FunctionSpec("SUM", 1, None, _fn_sum),
    ]
}


def evaluate(node: FormulaNode, sheet: Sheet) -> CellValue:
    """Evaluate a parsed formula against a sheet; total, never raises."""
    return _Evaluator(sheet).eval_node(node)
