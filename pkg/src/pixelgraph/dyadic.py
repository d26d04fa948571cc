"""Integer arithmetic on closed dyadic intervals.

Coordinates are carried as integer numerators over ``2**exp``. All overlap
tests treat intervals as closed, so touching endpoints count.
"""

from __future__ import annotations

from fractions import Fraction


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, float, or string such as ``"1/3"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def overlapping_cells(lo: int, hi: int, exp: int, cell_exp: int, count: int) -> tuple[int, int]:
    """0-based index range of grid cells at scale ``2**-cell_exp`` meeting ``[lo, hi] / 2**exp``.

    Returns ``(first, last)`` clipped to ``0 .. count-1``; ``first > last`` means empty.
    """
    scale = max(exp, cell_exp)
    lo <<= scale - exp
    hi <<= scale - exp
    width = 1 << (scale - cell_exp)
    first = max(0, -(-lo // width) - 1)
    last = min(count - 1, hi // width)
    return first, last


def cell_bounds(index: int, exp: int) -> tuple[Fraction, Fraction]:
    """Closed interval of the 1-based dyadic cell ``index`` at depth ``exp``."""
    return Fraction(index - 1, 1 << exp), Fraction(index, 1 << exp)
