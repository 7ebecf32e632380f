#!/usr/bin/env python3
"""Brute-force reference values for the example experience set.

Uses exact fractions throughout, independent of the Rust implementation.
The printed values are frozen into crates/cli/tests/acceptance.rs and
crates/core/tests/oracles.rs.
"""
from fractions import Fraction
import math

EXPERIENCE_SET = ["0.8", "0.7", "0.8", "0.6", "0.7", "0.5", "0.2", "0.7"]


def median(values):
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2


def semi_deviation_squared(values):
    mean = sum(values) / len(values)
    below = [v for v in values if v < mean]
    if not below:
        return Fraction(0)
    return sum((v - mean) ** 2 for v in below) / len(below)


def main():
    values = [Fraction(v) for v in EXPERIENCE_SET]
    med = median(values)
    sq = semi_deviation_squared(values)
    below_sum = sq * len([v for v in values if v < sum(values) / len(values)])
    print(f"median            = {med} ({float(med)})")
    print(f"mean              = {sum(values) / len(values)}")
    print(f"sum of squares    = {below_sum} ({float(below_sum)})")
    print(f"risk value^2      = {sq}")
    print(f"risk value        = {math.sqrt(sq):.17g}")
    print(f"general trust k=1 = {(Fraction(1, 2) + 1 * med) / 2}")


if __name__ == "__main__":
    main()
