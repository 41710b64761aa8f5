"""Independent slow-but-exact oracles used only by the tests.

Everything here is computed in pure Fraction arithmetic with explicit
truncation bounds, so these values owe nothing to the mpmath backend the
package uses: ln via argument reduction plus the atanh series, pi via the
Machin formula with alternating-series remainders.
"""

from __future__ import annotations

from fractions import Fraction


def atanh_oracle(t: Fraction, bits: int) -> Fraction:
    """atanh(t) for |t| <= 1/2 with error below 2^-bits."""
    t = Fraction(t)
    assert abs(t) <= Fraction(1, 2)
    t2 = t * t
    term = t
    total = Fraction(0)
    j = 0
    # remainder after term j is <= |t|^(2j+3) / ((2j+3)(1 - t^2))
    bound_scale = 1 / (1 - t2)
    while True:
        total += term / (2 * j + 1)
        term *= t2
        j += 1
        rem = abs(term) / (2 * j + 1) * bound_scale
        if rem < Fraction(1, 2 ** (bits + 1)):
            return total


def ln2_oracle(bits: int) -> Fraction:
    return 2 * atanh_oracle(Fraction(1, 3), bits + 2)


def ln_oracle(y: Fraction, bits: int) -> Fraction:
    """ln y for rational y > 0 with error below 2^-bits."""
    y = Fraction(y)
    assert y > 0
    e = 0
    while y >= 2:
        y /= 2
        e += 1
    while y < 1:
        y *= 2
        e -= 1
    # y in [1, 2): ln y = 2 atanh((y-1)/(y+1)), argument in [0, 1/3)
    t = (y - 1) / (y + 1)
    out = 2 * atanh_oracle(t, bits + 2)
    if e:
        out += e * ln2_oracle(bits + abs(e).bit_length() + 2)
    return out


def atan_oracle(x: Fraction, bits: int) -> Fraction:
    """atan(x) for |x| < 1 via the alternating Maclaurin series."""
    x = Fraction(x)
    assert abs(x) < 1
    x2 = x * x
    term = x
    total = Fraction(0)
    j = 0
    while True:
        contrib = term / (2 * j + 1)
        total += contrib if j % 2 == 0 else -contrib
        term *= x2
        j += 1
        if abs(term) / (2 * j + 1) < Fraction(1, 2 ** (bits + 1)):
            return total


def pi_oracle(bits: int) -> Fraction:
    """Machin: pi = 16 atan(1/5) - 4 atan(1/239)."""
    return 16 * atan_oracle(Fraction(1, 5), bits + 5) - 4 * atan_oracle(
        Fraction(1, 239), bits + 5)


def close_to(value: Fraction, target: Fraction, bits: int) -> bool:
    return abs(Fraction(value) - Fraction(target)) <= Fraction(1, 2 ** bits)
