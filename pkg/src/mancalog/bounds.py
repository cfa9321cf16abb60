"""Exact sub-intervals of [0, 1] with independently open or closed endpoints.

A :class:`Bound` is the lattice element attached to every label of every
network component.  Endpoints are :class:`fractions.Fraction` values, so
fixed-point convergence can be detected by plain equality.

Bounds are interned: building the same interval twice returns the same
object.  Every empty point set collapses to the single :data:`EMPTY` value.
"""

from __future__ import annotations

import re
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Number = Union[Fraction, int, str, Decimal]

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:/\d+)?")
_BOUND_RE = re.compile(
    r"\s*([\[(])\s*(\d+(?:\.\d+)?(?:/\d+)?)\s*,\s*(\d+(?:\.\d+)?(?:/\d+)?)\s*([\])])\s*"
)

_INTERN: dict[tuple, "Bound"] = {}


def to_fraction(value: Number) -> Fraction:
    """Convert an exact numeric value (or decimal literal) to a Fraction.

    Floats are refused: ``0.7`` as a float is not seven tenths.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is inexact; pass a string or Fraction")
    if isinstance(value, (Fraction, int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _NUMBER_RE.fullmatch(text):
            raise ValueError(f"not a decimal literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_number(q: Fraction) -> str:
    """Shortest decimal text for ``q`` with at least one fractional digit.

    Rationals without a finite decimal expansion are written ``n/d``.
    """
    if q.denominator == 1:
        return f"{q.numerator}.0"
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    digits = str(q.numerator * 10**places // q.denominator).rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}"


class Bound:
    """An interval ``bnd`` with ``bnd ⊆ [0, 1]``, or the empty bound.

    ``Bound(l, u, lower_open, upper_open)`` normalizes on construction; an
    empty point set yields :data:`EMPTY`.  Instances are immutable and
    interned, so ``==`` is identity.
    """

    __slots__ = ("lower", "upper", "lower_open", "upper_open", "_hash")

    lower: Fraction
    upper: Fraction
    lower_open: bool
    upper_open: bool

    def __new__(
        cls,
        lower: Number = 0,
        upper: Number = 1,
        lower_open: bool = False,
        upper_open: bool = False,
    ) -> "Bound":
        lo = to_fraction(lower)
        hi = to_fraction(upper)
        if not (0 <= lo <= 1 and 0 <= hi <= 1):
            raise ValueError(f"bound endpoints must lie in [0,1], got {lo}, {hi}")
        if lo > hi or (lo == hi and (lower_open or upper_open)):
            return EMPTY
        return cls._intern((lo, hi, bool(lower_open), bool(upper_open)))

    @classmethod
    def _intern(cls, key: tuple) -> "Bound":
        found = _INTERN.get(key)
        if found is not None:
            return found
        obj = object.__new__(cls)
        lo, hi, lo_open, hi_open = key
        object.__setattr__(obj, "lower", lo)
        object.__setattr__(obj, "upper", hi)
        object.__setattr__(obj, "lower_open", lo_open)
        object.__setattr__(obj, "upper_open", hi_open)
        object.__setattr__(obj, "_hash", hash(key))
        return _INTERN.setdefault(key, obj)

    @classmethod
    def parse(cls, text: str) -> "Bound":
        """Parse ``[l,u]``, ``(l,u]``, ``[l,u)``, ``(l,u)``, ``empty`` or ``true``."""
        stripped = text.strip()
        if stripped == "empty":
            return EMPTY
        if stripped == "true":
            return FULL
        m = _BOUND_RE.fullmatch(text)
        if m is None:
            raise ValueError(f"malformed bound: {text!r}")
        left, lo, hi, right = m.groups()
        return cls(lo, hi, left == "(", right == ")")

    @property
    def is_empty(self) -> bool:
        return self is EMPTY

    @property
    def is_full(self) -> bool:
        return self is FULL

    def __setattr__(self, name, value):
        raise AttributeError("Bound is immutable")

    def __reduce__(self):
        return (Bound.parse, (str(self),))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Bound):
            return NotImplemented
        # interning makes distinct objects distinct intervals
        return False

    def __and__(self, other: "Bound") -> "Bound":
        return intersect(self, other)

    def __or__(self, other: "Bound") -> "Bound":
        return hull(self, other)

    def __le__(self, other: "Bound") -> bool:
        return is_subset(self, other)

    def __contains__(self, point: Number) -> bool:
        if self is EMPTY:
            return False
        x = to_fraction(point)
        above = x > self.lower or (x == self.lower and not self.lower_open)
        below = x < self.upper or (x == self.upper and not self.upper_open)
        return above and below

    def __str__(self) -> str:
        if self is EMPTY:
            return "empty"
        return "{}{},{}{}".format(
            "(" if self.lower_open else "[",
            format_number(self.lower),
            format_number(self.upper),
            ")" if self.upper_open else "]",
        )

    def __repr__(self) -> str:
        return f"Bound.parse({str(self)!r})"


EMPTY: Bound = object.__new__(Bound)
for _name, _value in (
    ("lower", Fraction(1)),
    ("upper", Fraction(0)),
    ("lower_open", False),
    ("upper_open", False),
    ("_hash", hash("empty-bound")),
):
    object.__setattr__(EMPTY, _name, _value)
del _name, _value

FULL: Bound = Bound(0, 1)


@lru_cache(maxsize=1 << 18)
def intersect(a: Bound, b: Bound) -> Bound:
    """Set intersection of two bounds."""
    if a is EMPTY or b is EMPTY:
        return EMPTY
    if a is FULL:
        return b
    if b is FULL or a is b:
        return a
    if a.lower > b.lower:
        lo, lo_open = a.lower, a.lower_open
    elif a.lower < b.lower:
        lo, lo_open = b.lower, b.lower_open
    else:
        lo, lo_open = a.lower, a.lower_open or b.lower_open
    if a.upper < b.upper:
        hi, hi_open = a.upper, a.upper_open
    elif a.upper > b.upper:
        hi, hi_open = b.upper, b.upper_open
    else:
        hi, hi_open = a.upper, a.upper_open or b.upper_open
    return Bound(lo, hi, lo_open, hi_open)


@lru_cache(maxsize=1 << 18)
def hull(a: Bound, b: Bound) -> Bound:
    """Smallest interval containing both arguments."""
    if a is EMPTY:
        return b
    if b is EMPTY or a is b:
        return a
    if a.lower < b.lower:
        lo, lo_open = a.lower, a.lower_open
    elif a.lower > b.lower:
        lo, lo_open = b.lower, b.lower_open
    else:
        lo, lo_open = a.lower, a.lower_open and b.lower_open
    if a.upper > b.upper:
        hi, hi_open = a.upper, a.upper_open
    elif a.upper < b.upper:
        hi, hi_open = b.upper, b.upper_open
    else:
        hi, hi_open = a.upper, a.upper_open and b.upper_open
    return Bound(lo, hi, lo_open, hi_open)


@lru_cache(maxsize=1 << 18)
def is_subset(a: Bound, b: Bound) -> bool:
    """True iff every point of ``a`` lies in ``b``."""
    if a is EMPTY or b is FULL or a is b:
        return True
    if b is EMPTY:
        return False
    if a.lower < b.lower or (a.lower == b.lower and b.lower_open and not a.lower_open):
        return False
    if a.upper > b.upper or (a.upper == b.upper and b.upper_open and not a.upper_open):
        return False
    return True


def is_empty(a: Bound) -> bool:
    return a is EMPTY


def intersect_all(bounds: Iterable[Bound]) -> Bound:
    """Intersection of a collection; ``FULL`` when the collection is empty."""
    result = FULL
    for b in bounds:
        result = intersect(result, b)
        if result is EMPTY:
            break
    return result


def hull_all(bounds: Iterable[Bound]) -> Bound:
    result = EMPTY
    for b in bounds:
        result = hull(result, b)
    return result
