"""Exact non-negative scalars of the form ``r ** (1/k)`` with ``r`` rational.

Every distance produced by an l_p metric on lattice points is a k-th root of a
rational (``k = p``), so comparisons, products and quotients between such values
can be decided without rounding.  Only sums of genuinely irrational roots fall
back to floating point, see :func:`sum_le`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

Rational = Union[int, Fraction]

TOLERANCE = 1e-9


def iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of ``n >= 0`` or None when ``n`` is not a perfect power."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**k == n else None


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class ExactScalar:
    """The non-negative real ``radicand ** (1/index)``.

    Instances are normalised so that ``index`` is the smallest k for which the
    value's k-th power is rational; equal values therefore compare and hash equal.
    """

    radicand: Fraction
    index: int = 1

    def __post_init__(self) -> None:
        r = Fraction(self.radicand)
        if r < 0:
            raise ValueError("ExactScalar must be non-negative")
        k = int(self.index)
        if k < 1:
            raise ValueError("root index must be >= 1")
        if r == 0 or r == 1:
            k = 1
        changed = True
        while changed and k > 1:
            changed = False
            for q in _prime_factors(k):
                num, den = iroot(r.numerator, q), iroot(r.denominator, q)
                if num is not None and den is not None:
                    r, k, changed = Fraction(num, den), k // q, True
                    break
        object.__setattr__(self, "radicand", r)
        object.__setattr__(self, "index", k)

    @classmethod
    def of(cls, value: "ExactScalar | Rational") -> "ExactScalar":
        return value if isinstance(value, ExactScalar) else cls(Fraction(value))

    @property
    def is_rational(self) -> bool:
        return self.index == 1

    def as_fraction(self) -> Fraction:
        if self.index != 1:
            raise ValueError(f"{self} is irrational")
        return self.radicand

    def __float__(self) -> float:
        return float(self.radicand) ** (1.0 / self.index)

    def __bool__(self) -> bool:
        return self.radicand != 0

    def _powers(self, other: "ExactScalar") -> tuple[Fraction, Fraction]:
        m = _lcm(self.index, other.index)
        return self.radicand ** (m // self.index), other.radicand ** (m // other.index)

    def _cmp(self, other) -> int:
        other = ExactScalar.of(other)
        a, b = self._powers(other)
        return (a > b) - (a < b)

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar(Fraction(other))
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.radicand == other.radicand and self.index == other.index

    def __hash__(self) -> int:
        if self.index == 1:
            return hash(self.radicand)
        return hash((self.radicand, self.index))

    def __mul__(self, other) -> "ExactScalar":
        other = ExactScalar.of(other)
        m = _lcm(self.index, other.index)
        a, b = self._powers(other)
        return ExactScalar(a * b, m)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        other = ExactScalar.of(other)
        if not other:
            raise ZeroDivisionError("division by a vanishing scalar")
        m = _lcm(self.index, other.index)
        a, b = self._powers(other)
        return ExactScalar(a / b, m)

    def __pow__(self, n: int) -> "ExactScalar":
        if n < 0:
            return ExactScalar(1) / self ** (-n)
        return ExactScalar(self.radicand**n, self.index)

    def __str__(self) -> str:
        if self.index == 1:
            return str(self.radicand)
        return f"({self.radicand})^(1/{self.index})"

    def __repr__(self) -> str:
        return f"ExactScalar({self})"


ZERO = ExactScalar(Fraction(0))
ONE = ExactScalar(Fraction(1))


def sum_le(lhs: ExactScalar, terms: Iterable[ExactScalar], scale: Rational = 1) -> tuple[bool, bool]:
    """Decide ``lhs <= scale * sum(terms)``.

    Returns ``(holds, exact)``.  Rational terms, a single surviving term, and
    square roots with at most two non-zero terms are decided exactly; anything
    else is compared in floating point with tolerance ``1e-9``.
    """
    scale = Fraction(scale)
    rest = [t for t in terms if t]
    if not rest or scale == 0:
        return (not lhs), True
    if all(t.index == 1 for t in rest):
        return lhs <= ExactScalar(scale * sum(t.radicand for t in rest)), True
    if len(rest) == 1:
        return lhs <= rest[0] * scale, True
    if len(rest) == 2 and lhs.index in (1, 2) and all(t.index in (1, 2) for t in rest):
        # sqrt(a) <= sqrt(b) + sqrt(c)  <=>  a-b-c <= 0 or (a-b-c)^2 <= 4bc, all after scaling
        a = lhs.radicand ** (2 // lhs.index)
        b, c = ((scale * scale) * t.radicand ** (2 // t.index) for t in rest)
        diff = a - b - c
        return (diff <= 0 or diff * diff <= 4 * b * c), True
    total = float(scale) * sum(float(t) for t in rest)
    return float(lhs) <= total + TOLERANCE, False
