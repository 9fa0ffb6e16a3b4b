#!/usr/bin/env python3
"""Regenerates include/sosbm/detail/erfc_table.hpp.

Chebyshev expansions of the scaled complementary error function
f(z) = exp(z^2) erfc(z) on a handful of intervals of [0, 8], plus an
expansion of z*sqrt(pi)*f(z) in s = 1/z on (0, 1/8] for the tail.
"""
import sys
import mpmath as mp

mp.mp.dps = 50
TOL = mp.mpf("1e-19")
MAX_DEGREE = 48


def erfcx(z):
    return mp.exp(z * z) * mp.erfc(z)


def tail(s):
    if s == 0:
        return mp.mpf(1)
    z = 1 / s
    return z * mp.sqrt(mp.pi) * erfcx(z)


def chebfit(fn, lo, hi):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    n = 80
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n) for k in range(n)]
    vals = [fn((hi - lo) / 2 * u + (hi + lo) / 2) for u in nodes]
    coeffs = []
    for j in range(n):
        c = 2 * mp.fsum(vals[k] * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / n) for k in range(n)) / n
        coeffs.append(c)
    coeffs[0] /= 2
    deg = len(coeffs) - 1
    while deg > 0 and abs(coeffs[deg]) < TOL:
        deg -= 1
    deg = min(deg + 1, MAX_DEGREE)
    return coeffs[: deg + 1]


def main(out):
    intervals = [(0, 0.5), (0.5, 1), (1, 2), (2, 4), (4, 8)]
    lines = [
        "// Generated by tools/gen_erfc_table.py; do not edit by hand.",
        "#pragma once",
        "",
        "#include <array>",
        "",
        "namespace sosbm::detail {",
        "",
        "struct ChebyshevPiece {",
        "  double lo;",
        "  double hi;",
        "  int degree;",
        "  const double* coeffs;",
        "};",
        "",
    ]
    names = []
    for i, (lo, hi) in enumerate(intervals):
        c = chebfit(erfcx, lo, hi)
        name = f"kErfcxPiece{i}"
        names.append((lo, hi, len(c) - 1, name))
        lines.append(f"inline constexpr std::array<double, {len(c)}> {name} = {{")
        lines += [f"    {mp.nstr(x, 20, min_fixed=-1, max_fixed=-1)}," for x in c]
        lines.append("};")
        lines.append("")
    c = chebfit(tail, 0, mp.mpf(1) / 8)
    lines.append("// z*sqrt(pi)*exp(z^2)*erfc(z) as a function of s = 1/z on [0, 1/8].")
    lines.append(f"inline constexpr std::array<double, {len(c)}> kErfcxTail = {{")
    lines += [f"    {mp.nstr(x, 20, min_fixed=-1, max_fixed=-1)}," for x in c]
    lines.append("};")
    lines.append("")
    lines.append(f"inline constexpr std::array<ChebyshevPiece, {len(names)}> kErfcxPieces = {{{{")
    for lo, hi, deg, name in names:
        lines.append(f"    {{{lo}, {hi}, {deg}, {name}.data()}},")
    lines.append("}};")
    lines.append("")
    lines.append("}  // namespace sosbm::detail")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/sosbm/detail/erfc_table.hpp")
