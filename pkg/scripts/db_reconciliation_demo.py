#!/usr/bin/env python3
"""Show how 3-decimal rate rounding breaks declining-balance reconciliation.

Builds the same schedule in compat mode (rate rounded to three decimals, as
legacy spreadsheets do) and exact mode, then prints both against the salvage
target.  Also demonstrates the month argument's extra final period.
"""

import argparse

from ledgerlint.depreciation import (
    DepreciationSpec,
    PrecisionMode,
    db_rate,
    db_schedule,
    reconcile,
)


def print_schedule(title: str, spec: DepreciationSpec, mode: PrecisionMode) -> None:
    schedule = db_schedule(spec, mode)
    report = reconcile(schedule, spec)
    print(f"\n{title}")
    print(f"  rate = {schedule.rate!r}")
    print(f"  {'period':>6} {'depreciation':>16} {'book value':>16}")
    for row in schedule.rows:
        print(f"  {row.period:>6} {row.depreciation:>16.2f} {row.book_value_end:>16.2f}")
    print(f"  salvage target      {spec.salvage:>16.2f}")
    print(f"  residual book value {report.residual_book_value:>16.2f}")
    print(f"  gap                 {report.gap:>16.2f}"
          + ("   <-- does not reconcile" if report.flagged else ""))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cost", type=float, default=1_000_000.0)
    parser.add_argument("--salvage", type=float, default=100_000.0)
    parser.add_argument("--life", type=int, default=6)
    args = parser.parse_args()

    spec = DepreciationSpec(cost=args.cost, salvage=args.salvage, life=args.life)
    exact = db_rate(spec, PrecisionMode.EXACT)
    compat = db_rate(spec, PrecisionMode.COMPAT)
    print(f"exact rate:  {exact!r}")
    print(f"compat rate: {compat!r}  (rounded to 3 decimals before compounding)")

    print_schedule("compat mode", spec, PrecisionMode.COMPAT)
    print_schedule("exact mode", spec, PrecisionMode.EXACT)

    partial = DepreciationSpec(
        cost=args.cost, salvage=args.salvage, life=args.life, month=7
    )
    schedule = db_schedule(partial, PrecisionMode.COMPAT)
    print(f"\nwith month=7 the schedule grows to {len(schedule.rows)} periods "
          f"(life {args.life} plus one):")
    print(f"  first-year depreciation is pro-rated to 7/12: "
          f"{schedule.rows[0].depreciation:.2f}")
    print(f"  the final period {schedule.rows[-1].period} carries the remaining "
          f"{schedule.rows[-1].depreciation:.2f}")


if __name__ == "__main__":
    main()
