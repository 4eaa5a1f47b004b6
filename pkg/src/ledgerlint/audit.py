"""Misuse detection over evaluated workbooks.

Each rule pattern-matches formula ASTs (resolving cell values where needed)
and yields located findings.  Rules are stateless, skip anything they cannot
interpret, and never abort an audit.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator, Mapping

from .daycount import year_fraction
from .formula import (
    Binary,
    Call,
    Cell,
    CellRef,
    EmptyArg,
    ErrorValue,
    FormulaNode,
    NumberLit,
    RangeRef,
    Sheet,
    Unary,
    evaluate,
)
from .formula.ast import column_to_index, format_number

__all__ = [
    "RULE_IDS",
    "Severity",
    "Finding",
    "RuleConfig",
    "run_rules",
    "explain_rule",
    "render_text",
    "to_record",
]


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: Severity
    cell: str
    message: str
    evidence: tuple[tuple[str, str], ...] = ()


# which argument index of a call is a rate, and which is a day-count basis
RATE_POSITIONS = {"NPV": 0, "XNPV": 0, "PMT": 0, "EFFECT": 0, "NOMINAL": 0, "ACCRINT": 2}
BASIS_POSITIONS = {"ACCRINT": 4, "INTRATE": 4, "DAYS360": 2}

DEFAULT_THRESHOLDS = {"R3": 1.0, "R5": 1.0}


def _display(value) -> str:
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, dt.date):
        return value.isoformat()
    if isinstance(value, ErrorValue):
        return value.code
    return str(value)


def _walk(node: FormulaNode, ancestors: tuple = ()) -> Iterator[tuple[FormulaNode, tuple]]:
    yield node, ancestors
    below = ancestors + (node,)
    if isinstance(node, Unary):
        yield from _walk(node.child, below)
    elif isinstance(node, Binary):
        yield from _walk(node.left, below)
        yield from _walk(node.right, below)
    elif isinstance(node, Call):
        for arg in node.args:
            if not isinstance(arg, EmptyArg):
                yield from _walk(arg, below)


def _ref_evidence(sheet: Sheet, *nodes: FormulaNode) -> tuple[tuple[str, str], ...]:
    pairs = []
    for node in nodes:
        if isinstance(node, CellRef):
            pairs.append((node.address, _display(sheet.value(node.address))))
    return tuple(pairs)


def _resolved_number(sheet: Sheet, node: FormulaNode) -> float | None:
    value = evaluate(node, sheet)
    return value if isinstance(value, float) else None


def _resolved_date(sheet: Sheet, node: FormulaNode) -> dt.date | None:
    value = evaluate(node, sheet)
    return value if isinstance(value, dt.date) else None


def _rule_r1(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, ancestors in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name == "NPV" and len(node.args) >= 2):
            continue
        if any(isinstance(a, Binary) and a.op in ("+", "-") for a in ancestors):
            continue  # a separate additive term holds the period-0 flow
        values_arg = node.args[1]
        if not isinstance(values_arg, RangeRef):
            continue
        first = None
        for address in sheet.range_addresses(values_arg):
            value = sheet.value(address)
            if isinstance(value, float):
                first = (address, value)
                break
        if first is None or first[1] >= 0.0:
            continue
        source = f"{values_arg.start.address}:{values_arg.end.address}"
        yield Finding(
            "R1",
            config.severity("R1"),
            cell.address,
            f"NPV range {source} starts with the negative value "
            f"{format_number(first[1])}; NPV discounts every argument by one "
            "period, so an initial investment fed into the call is discounted "
            "too - keep the period-0 flow outside: value0 + NPV(rate, later "
            "flows)",
            evidence=((first[0], _display(first[1])),),
        )


def _rule_r2(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name in ("NPV", "PMT") and node.args):
            continue
        rate_arg = node.args[RATE_POSITIONS[node.name]]
        if (
            isinstance(rate_arg, Binary)
            and rate_arg.op == "/"
            and isinstance(rate_arg.right, NumberLit)
            and rate_arg.right.value == 12.0
        ):
            yield Finding(
                "R2",
                config.severity("R2"),
                cell.address,
                f"rate argument of {node.name} is written as X/12; dividing an "
                "annual rate by 12 is only right for nominal quotes - for an "
                "effective annual rate convert with NOMINAL(rate,12)/12 or "
                "(1+rate)^(1/12)-1",
            )


def _rule_r3(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    from .formula.evaluator import BASIS_CODES
    from .daycount import DayCountBasis

    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name == "INTRATE" and len(node.args) >= 4):
            continue
        settlement = _resolved_date(sheet, node.args[0])
        maturity = _resolved_date(sheet, node.args[1])
        if settlement is None or maturity is None:
            continue
        basis = DayCountBasis.US_30_360
        if len(node.args) > 4 and not isinstance(node.args[4], EmptyArg):
            code = _resolved_number(sheet, node.args[4])
            if code is None or code != int(code) or int(code) not in BASIS_CODES:
                continue
            basis = BASIS_CODES[int(code)]
        try:
            span = year_fraction(settlement, maturity, basis)
        except ValueError:
            continue
        if span > config.threshold("R3"):
            yield Finding(
                "R3",
                config.severity("R3"),
                cell.address,
                f"INTRATE spans {span:.2f} years; it computes simple interest "
                "only, so over multi-year spans it is not the compound "
                "equivalent yield",
                evidence=_ref_evidence(sheet, node.args[0], node.args[1]),
            )


def _rule_r4(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name == "DB" and len(node.args) >= 5):
            continue
        month_arg = node.args[4]
        if isinstance(month_arg, EmptyArg):
            continue
        month = _resolved_number(sheet, month_arg)
        if month is None or month >= 12.0:
            continue
        yield Finding(
            "R4",
            config.severity("R4"),
            cell.address,
            f"DB with month={format_number(month)} takes a partial first year; "
            "the schedule needs an extra final period (life+1 rows) or total "
            "depreciation will not reconcile with cost minus salvage",
            evidence=_ref_evidence(sheet, month_arg),
        )


def _rule_r5(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name in RATE_POSITIONS):
            continue
        index = RATE_POSITIONS[node.name]
        if len(node.args) <= index or isinstance(node.args[index], EmptyArg):
            continue
        rate = _resolved_number(sheet, node.args[index])
        if rate is None or rate < config.threshold("R5"):
            continue
        yield Finding(
            "R5",
            config.severity("R5"),
            cell.address,
            f"rate argument of {node.name} resolves to {format_number(rate)}; "
            "rates are fractions, so this reads as "
            f"{format_number(rate * 100)}% - a percentage was probably entered "
            "at a hundred times the value intended",
            evidence=_ref_evidence(sheet, node.args[index]),
        )


def _plausible_year(value: float) -> bool:
    return 0 <= value <= 99 or 1900 <= value <= 2199


def _rule_r6(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Binary) and node.op == "/"):
            continue
        inner = node.left
        if not (isinstance(inner, Binary) and inner.op == "/"):
            continue
        parts = (inner.left, inner.right, node.right)
        if not all(isinstance(p, NumberLit) for p in parts):
            continue
        day, month, year = (p.value for p in parts)
        if any(v != int(v) for v in (day, month, year)):
            continue
        if not (1 <= day <= 31 and 1 <= month <= 12 and _plausible_year(year)):
            continue
        chain = f"{format_number(day)}/{format_number(month)}/{format_number(year)}"
        result = evaluate(node, sheet)
        yield Finding(
            "R6",
            config.severity("R6"),
            cell.address,
            f"{chain} is a division chain evaluating to {_display(result)}, "
            "not a date; dates typed into formulas become arithmetic - put an "
            "ISO date (YYYY-MM-DD) in a cell and reference it",
        )


def _rule_r7(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (isinstance(node, Call) and node.name in BASIS_POSITIONS):
            continue
        index = BASIS_POSITIONS[node.name]
        if len(node.args) > index and not isinstance(node.args[index], EmptyArg):
            continue
        parameter = "method" if node.name == "DAYS360" else "basis"
        yield Finding(
            "R7",
            config.severity("R7"),
            cell.address,
            f"{node.name} call omits the {parameter} argument, silently "
            "defaulting to US (NASD) 30/360; state the day-count convention "
            "explicitly if European 30/360 or actual-day counting was meant",
        )


def _rule_r8(cell: Cell, sheet: Sheet, config: "RuleConfig") -> Iterator[Finding]:
    for node, _ in _walk(cell.formula):
        if not (
            isinstance(node, Binary)
            and node.op == "/"
            and isinstance(node.right, NumberLit)
            and node.right.value == 360.0
        ):
            continue
        numerator = node.left
        if not (isinstance(numerator, Binary) and numerator.op == "-"):
            continue
        left_date = _resolved_date(sheet, numerator.left)
        right_date = _resolved_date(sheet, numerator.right)
        if left_date is None or right_date is None:
            continue
        yield Finding(
            "R8",
            config.severity("R8"),
            cell.address,
            "actual-day difference divided by a literal 360 mixes conventions; "
            "a full year counts about 365/360 = 1.4% extra interest, a known "
            "revenue-inflating pattern - divide by 365 or use one basis "
            "throughout",
            evidence=_ref_evidence(sheet, numerator.left, numerator.right),
        )


@dataclass(frozen=True)
class _RuleSpec:
    rule_id: str
    title: str
    default_severity: Severity
    explanation: str
    check: Callable[[Cell, Sheet, "RuleConfig"], Iterator[Finding]]


_RULES: dict[str, _RuleSpec] = {
    spec.rule_id: spec
    for spec in [
        _RuleSpec(
            "R1",
            "NPV-PERIOD0",
            Severity.WARNING,
            "NPV discounts every value it is given, treating the first as "
            "arriving one period out.  Feeding an entire cash-flow series "
            "(initial outlay included) into the call therefore discounts the "
            "period-0 investment as well, understating the result.  Keep the "
            "initial flow outside: value0 + NPV(rate, later flows).  This "
            "rule is a heuristic: a genuinely negative period-1 flow at the "
            "head of the range looks identical and is a known false-positive "
            "shape.",
            _rule_r1,
        ),
        _RuleSpec(
            "R2",
            "RATE-DIV-12",
            Severity.INFO,
            "Dividing an annual rate by 12 assumes the quote is nominal "
            "(simple) annual.  If the rate is an effective annual rate, the "
            "division overstates the monthly rate and every payment built on "
            "it.  Convert between effective and nominal quotes explicitly: "
            "EFFECT(nominal, 12) compounds a nominal quote to effective, "
            "NOMINAL(effective, 12) does the reverse, and the true monthly "
            "equivalent of an effective rate is (1+rate)^(1/12)-1.",
            _rule_r2,
        ),
        _RuleSpec(
            "R3",
            "INTRATE-COMPOUND",
            Severity.WARNING,
            "INTRATE returns (redemption - investment) / investment divided "
            "by the year fraction: simple interest, no compounding.  Over "
            "spans beyond one year the result is not an annually compounded "
            "yield; 100 growing to 125 over two years is 12.5% simple but "
            "only about 11.8% compounded.  For multi-year spans use a "
            "compound-equivalent rate instead.",
            _rule_r3,
        ),
        _RuleSpec(
            "R4",
            "DB-MONTH",
            Severity.WARNING,
            "A DB month argument below 12 pro-rates the first year, pushing "
            "the remaining months of depreciation into an extra period after "
            "the asset's stated life.  Schedules must include life+1 rows or "
            "total depreciation will not reconcile with cost minus salvage.",
            _rule_r4,
        ),
        _RuleSpec(
            "R5",
            "RATE-MAGNITUDE",
            Severity.ERROR,
            "Financial functions take rates as fractions (0.12 is 12%).  An "
            "argument of 1 or more in a rate position almost always means a "
            "percentage was entered as a whole number, making the rate a "
            "hundred times the value intended.",
            _rule_r5,
        ),
        _RuleSpec(
            "R6",
            "DATE-AS-ARITHMETIC",
            Severity.ERROR,
            "A date typed into a numeric context, such as 1/1/80, parses as a "
            "division chain and evaluates to a small number (0.0125), not a "
            "date.  Store dates as ISO YYYY-MM-DD cell values and reference "
            "the cell; never type slash dates inside formulas.",
            _rule_r6,
        ),
        _RuleSpec(
            "R7",
            "BASIS-DEFAULT",
            Severity.INFO,
            "Day-count functions default their basis argument to US (NASD) "
            "30/360 when it is omitted.  The European 30/360 variant rounds "
            "month-end dates differently, and actual/actual, actual/360, and "
            "actual/365 count real days; results can differ by several days "
            "of interest.  Pass the basis explicitly so the convention in "
            "force is visible.",
            _rule_r7,
        ),
        _RuleSpec(
            "R8",
            "DIVISOR-360",
            Severity.INFO,
            "Dividing an actual-day difference by 360 mixes an actual-day "
            "numerator with a 360-day year, crediting roughly 365/360 = 1.4% "
            "extra interest per year.  The mixed basis is a known "
            "revenue-inflating pattern; divide actual days by 365, or use a "
            "single day-count basis on both sides.",
            _rule_r8,
        ),
    ]
}

RULE_IDS = tuple(_RULES)


@dataclass(frozen=True)
class RuleConfig:
    """Which rules run, their thresholds, and their severities."""

    enabled: frozenset[str] = frozenset(RULE_IDS)
    thresholds: Mapping[str, float] = field(default_factory=dict)
    severities: Mapping[str, Severity] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping) -> "RuleConfig":
        unknown_fields = set(data) - {"enabled", "thresholds", "severities"}
        if unknown_fields:
            raise ValueError(f"unknown config fields: {sorted(unknown_fields)}")
        enabled = data.get("enabled")
        if enabled is None:
            enabled_set = frozenset(RULE_IDS)
        else:
            enabled_set = frozenset(enabled)
            for rule_id in sorted(enabled_set - set(RULE_IDS)):
                raise ValueError(f"unknown rule id in enabled: {rule_id}")
        thresholds = {}
        for rule_id, value in dict(data.get("thresholds", {})).items():
            if rule_id not in RULE_IDS:
                raise ValueError(f"unknown rule id in thresholds: {rule_id}")
            if not isinstance(value, (int, float)) or not value > 0:
                raise ValueError(f"threshold for {rule_id} must be positive, got {value}")
            thresholds[rule_id] = float(value)
        severities = {}
        for rule_id, name in dict(data.get("severities", {})).items():
            if rule_id not in RULE_IDS:
                raise ValueError(f"unknown rule id in severities: {rule_id}")
            try:
                severities[rule_id] = Severity(name)
            except ValueError:
                valid = ", ".join(s.value for s in Severity)
                raise ValueError(
                    f"invalid severity {name!r} for {rule_id}; expected one of {valid}"
                ) from None
        return cls(enabled=enabled_set, thresholds=thresholds, severities=severities)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "RuleConfig":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        if not isinstance(data, dict):
            raise ValueError(f"rule config must be a JSON object: {path}")
        return cls.from_dict(data)

    def threshold(self, rule_id: str) -> float:
        return self.thresholds.get(rule_id, DEFAULT_THRESHOLDS.get(rule_id, 0.0))

    def severity(self, rule_id: str) -> Severity:
        return self.severities.get(rule_id, _RULES[rule_id].default_severity)


def run_rules(sheet: Sheet, config: RuleConfig | None = None) -> list[Finding]:
    """Audit every formula cell; findings come back ordered by (row, column, rule)."""
    if config is None:
        config = RuleConfig()
    findings: list[Finding] = []
    ordered = sorted(sheet.cells.values(), key=lambda c: (c.row, column_to_index(c.column)))
    for cell in ordered:
        if cell.formula is None:
            continue
        for rule_id in RULE_IDS:
            if rule_id in config.enabled:
                findings.extend(_RULES[rule_id].check(cell, sheet, config))
    return findings


def explain_rule(rule_id: str) -> str:
    """Financial rationale and recommended correction; KeyError if unknown."""
    return _RULES[rule_id].explanation


def render_text(finding: Finding, file_label: str) -> str:
    return (
        f"{file_label}:{finding.cell} {finding.rule_id} "
        f"{finding.severity.value} {finding.message}"
    )


def to_record(finding: Finding, file_label: str) -> dict:
    return {
        "file": file_label,
        "cell": finding.cell,
        "rule_id": finding.rule_id,
        "severity": finding.severity.value,
        "message": finding.message,
        "evidence": [
            {"cell": address, "value": value} for address, value in finding.evidence
        ],
    }
