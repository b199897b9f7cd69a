"""Exact scalar types used by the symbolic layer.

Two number types cover everything the angular-momentum algebra produces:

* :class:`SqrtRational` -- a signed square root of a non-negative rational,
  ``sign * sqrt(p/q)``.  Clebsch-Gordan coefficients and the coefficients of
  symmetry-adapted states are all of this form.
* :class:`Radical` -- a rational linear combination of square roots of
  squarefree integers.  Sums of :class:`SqrtRational` values live here, e.g.
  the matrix entries of products of ladder operators.

Both are immutable and hashable.  A small fraction-based row reduction
(:func:`nullspace`) is provided for exact kernels.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(a, b)`` with ``n == a*a*b`` and ``b`` squarefree."""
    if n < 0:
        raise ValueError("negative argument")
    if n == 0:
        return 0, 1
    a, b = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        a *= p ** (e // 2)
        if e % 2:
            b *= p
        p += 1
    b *= rest
    return a, b


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class SqrtRational:
    """Signed square root of a rational number."""

    __slots__ = ("sign", "square")

    def __init__(self, sign: int, square):
        square = _as_fraction(square)
        if square < 0:
            raise ValueError("square must be non-negative")
        if square == 0:
            sign = 0
        elif sign not in (-1, 1):
            raise ValueError("sign must be -1 or +1 for a nonzero value")
        object.__setattr__(self, "sign", int(sign))
        object.__setattr__(self, "square", square)

    def __setattr__(self, name, value):
        raise AttributeError("SqrtRational is immutable")

    @classmethod
    def from_rational(cls, x) -> "SqrtRational":
        x = _as_fraction(x)
        return cls(1 if x > 0 else -1 if x < 0 else 0, x * x)

    @classmethod
    def sqrt(cls, x) -> "SqrtRational":
        x = _as_fraction(x)
        return cls(1 if x else 0, x)

    def __mul__(self, other):
        if isinstance(other, SqrtRational):
            return SqrtRational(self.sign * other.sign, self.square * other.square)
        if isinstance(other, (int, Fraction)):
            return self * SqrtRational.from_rational(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        if not isinstance(other, SqrtRational):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by zero")
        return SqrtRational(self.sign * other.sign, self.square / other.square)

    def __neg__(self):
        return SqrtRational(-self.sign, self.square)

    def __abs__(self):
        return SqrtRational(abs(self.sign), self.square)

    def __bool__(self):
        return self.sign != 0

    def __float__(self):
        return self.sign * math.sqrt(self.square.numerator / self.square.denominator)

    def __eq__(self, other):
        if isinstance(other, SqrtRational):
            return self.sign == other.sign and self.square == other.square
        if isinstance(other, (int, Fraction)):
            return self == SqrtRational.from_rational(other)
        if isinstance(other, Radical):
            return Radical.from_sqrt_rational(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.sign, self.square))

    def __repr__(self):
        s = "-" if self.sign < 0 else ""
        return f"{s}sqrt({self.square})"

    def triple(self) -> tuple[int, int, int]:
        """``(sign, numerator, denominator)`` of the squared value."""
        return self.sign, self.square.numerator, self.square.denominator

    @classmethod
    def from_triple(cls, t: Sequence[int]) -> "SqrtRational":
        return cls(int(t[0]), Fraction(int(t[1]), int(t[2])))

    def to_radical(self) -> "Radical":
        return Radical.from_sqrt_rational(self)


class Radical:
    """Exact element of Q(sqrt 2, sqrt 3, sqrt 5, ...).

    Stored as ``{squarefree k: rational q_k}`` meaning ``sum q_k sqrt(k)``.
    Zero is the empty map; square roots of distinct squarefree integers are
    linearly independent over Q, so equality is structural.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        clean = {}
        for k, q in (terms or {}).items():
            q = _as_fraction(q)
            if q:
                clean[int(k)] = q
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Radical is immutable")

    @classmethod
    def rational(cls, x) -> "Radical":
        return cls({1: _as_fraction(x)})

    @classmethod
    def sqrt(cls, x) -> "Radical":
        """Exact square root of a non-negative rational."""
        return cls.from_sqrt_rational(SqrtRational.sqrt(x))

    @classmethod
    def from_sqrt_rational(cls, v: SqrtRational) -> "Radical":
        if not v.sign:
            return cls()
        p, q = v.square.numerator, v.square.denominator
        a, b = squarefree_split(p * q)
        return cls({b: Fraction(v.sign * a, q)})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def _coerce(self, other):
        if isinstance(other, Radical):
            return other
        if isinstance(other, (int, Fraction)):
            return Radical.rational(other)
        if isinstance(other, SqrtRational):
            return Radical.from_sqrt_rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, q in other._terms.items():
            out[k] = out.get(k, 0) + q
        return Radical(out)

    __radd__ = __add__

    def __neg__(self):
        return Radical({k: -q for k, q in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for k1, q1 in self._terms.items():
            for k2, q2 in other._terms.items():
                g = math.gcd(k1, k2)
                k = (k1 // g) * (k2 // g)
                out[k] = out.get(k, 0) + q1 * q2 * g
        return Radical(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __float__(self):
        return float(sum(float(q) * math.sqrt(k) for k, q in self._terms.items()))

    def is_rational(self) -> bool:
        return set(self._terms) <= {1}

    def __repr__(self):
        if not self._terms:
            return "Radical(0)"
        parts = []
        for k in sorted(self._terms):
            q = self._terms[k]
            parts.append(f"{q}" if k == 1 else f"{q}*sqrt({k})")
        return "Radical(" + " + ".join(parts) + ")"


def to_float(x) -> float:
    return float(x)


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Exact kernel basis of a rational matrix.

    Gauss-Jordan elimination with pivots taken column by column in index
    order; one basis vector per free column with a unit entry there.  The
    output is therefore a deterministic function of the matrix.
    """
    m = [[Fraction(x) for x in r] for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def best_rational(x: float, tol: float = 1e-9, max_den: int = 10**6) -> Fraction | None:
    """Continued-fraction reconstruction; ``None`` if nothing within ``tol``."""
    q = Fraction(x).limit_denominator(max_den)
    if abs(float(q) - x) <= tol:
        return q
    return None


def exact_sum(values: Iterable) -> Radical:
    total = Radical()
    for v in values:
        total = total + v
    return total
