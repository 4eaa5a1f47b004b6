#!/usr/bin/env python3
"""Compare UK (effective-root) and US (nominal-divide) monthly-rate conventions.

For a quoted effective annual rate, the US habit of dividing by 12 produces a
higher monthly rate and a higher level payment than the 12th-root conversion
the quote actually implies.  The script builds both schedules, recovers the
monthly rate each one embeds by bisection, and shows the UK advertising
truncation of the annual rate to one decimal of percent.
"""

import argparse

from ledgerlint.loan import LoanSpec, build_schedule, implied_monthly_rate
from ledgerlint.rates import (
    PeriodicConvention,
    advertised_apr,
    parse_rate,
    periodic_rate,
    verify_advertised,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--principal", type=float, default=10_000.0)
    parser.add_argument("--rate", default="12.682503013196977%",
                        help='quoted effective annual rate, "0.1268..." or "12.68...%%"')
    parser.add_argument("--term", type=int, default=60, help="term in months")
    args = parser.parse_args()

    annual = parse_rate(args.rate)
    print(f"quoted effective annual rate: {annual!r}")

    for label, convention in (
        ("UK effective-root", PeriodicConvention.UK_EFFECTIVE_ROOT),
        ("US nominal-divide", PeriodicConvention.US_NOMINAL_DIVIDE),
    ):
        monthly = periodic_rate(annual, 12, convention)
        spec = LoanSpec(
            principal=args.principal,
            annual_rate=annual,
            term_months=args.term,
            convention=convention,
        )
        schedule = build_schedule(spec)
        payment = schedule.rows[0].payment
        recovered = implied_monthly_rate(args.principal, payment, args.term)
        print(f"\n{label}:")
        print(f"  monthly rate           {monthly!r}")
        print(f"  level payment          {payment:.2f}")
        print(f"  total interest paid    {schedule.total_interest:.2f}")
        print(f"  implied monthly rate   {recovered.rate!r} "
              f"({recovered.iterations} bisection steps)")
        print(f"  implied annual rate    {(1 + recovered.rate) ** 12 - 1!r}")

    advertised = advertised_apr(annual)
    verdict = verify_advertised(annual, advertised)
    print(f"\nadvertising: the exact annual {annual:.6%} may be published as "
          f"{advertised:.1%} (truncated to one decimal of percent); "
          f"check: {verdict.status.value}")


if __name__ == "__main__":
    main()
