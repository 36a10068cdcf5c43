"""Rank data, parities, affine Cartan tables and the coefficient field.

Coefficients live in Q(eps1, eps2, alpha).  They are stored as a reduced
fraction of two ``flint.fmpq_mpoly`` polynomials with a monic denominator
(graded-lex order, eps1 > eps2 > alpha), so that ``==`` and ``hash`` are
purely syntactic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

VARIABLES = ("eps1", "eps2", "alpha")
_CTX = flint.fmpq_mpoly_ctx.get(VARIABLES, "deglex")


class RankError(ValueError):
    """Raised for rank data outside m, n >= 2, m != n."""


@dataclass(frozen=True)
class RankData:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 2 or self.n < 2:
            raise RankError(f"need m, n >= 2 (got m={self.m}, n={self.n})")
        if self.m == self.n:
            raise RankError(
                f"need m != n (got m = n = {self.m}); the affine super Yangian "
                "is only defined for m, n >= 2 and m != n")

    @property
    def size(self) -> int:
        return self.m + self.n

    def __str__(self):
        return f"gl({self.m}|{self.n})"


def parity(ctx: RankData, i: int) -> int:
    """p(i): 0 on 1..m, 1 on m+1..m+n, with p(0) = p(m+n)."""
    if not 0 <= i <= ctx.size:
        raise IndexError(f"node index {i} outside 0..{ctx.size}")
    if i == 0:
        return 1
    return 0 if i <= ctx.m else 1


def sign(ctx: RankData, i: int) -> int:
    return -1 if parity(ctx, i) else 1


def unit_parity(ctx: RankData, i: int, j: int) -> int:
    """Parity of the matrix unit E_{i,j}."""
    return (parity(ctx, i) + parity(ctx, j)) % 2


def _check_node(ctx, i):
    if not 0 <= i < ctx.size:
        raise IndexError(f"node index {i} outside 0..{ctx.size - 1}")


def cartan_a(ctx: RankData, i: int, j: int) -> int:
    _check_node(ctx, i)
    _check_node(ctx, j)
    last = ctx.size - 1
    if i == j:
        return sign(ctx, i) + sign(ctx, i + 1)
    if j == i + 1:
        return -sign(ctx, i + 1)
    if j == i - 1:
        return -sign(ctx, i)
    if (i, j) in ((0, last), (last, 0)):
        return 1
    return 0


def cartan_m(ctx: RankData, i: int, j: int) -> int:
    _check_node(ctx, i)
    _check_node(ctx, j)
    last = ctx.size - 1
    if j == i + 1:
        return -sign(ctx, i + 1)
    if i == j + 1:
        return sign(ctx, i)
    if (i, j) == (0, last):
        return -1
    if (i, j) == (last, 0):
        return 1
    return 0


def delta_le(i: int, j: int) -> int:
    """The indicator delta(i <= j)."""
    return 1 if i <= j else 0


# ---------------------------------------------------------------------------
# scalars


def _poly(value) -> flint.fmpq_mpoly:
    if isinstance(value, flint.fmpq_mpoly):
        return value
    if isinstance(value, Fraction):
        return _CTX.constant(flint.fmpq(value.numerator, value.denominator))
    return _CTX.constant(value)


class Scalar:
    """Element of Q(eps1, eps2, alpha) in reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1, *, reduced=False):
        num, den = _poly(num), _poly(den)
        if not reduced:
            if den.is_zero():
                raise ZeroDivisionError("scalar with zero denominator")
            if num.is_zero():
                den = _CTX.constant(1)
            elif not den.is_constant():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
            lc = den.leading_coefficient()
            if lc != 1:
                num = num / lc
                den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers
    @classmethod
    def _make(cls, num, den):
        out = object.__new__(cls)
        out.num = num
        out.den = den
        out._hash = None
        return out

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction, flint.fmpq, flint.fmpz, flint.fmpq_mpoly)):
            return cls(value)
        raise TypeError(f"cannot make a scalar from {value!r}")

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                if self.den.is_one():
                    return Scalar._make(self.num + other, self.den)
                return Scalar(self.num + other * self.den, self.den, reduced=True)
            other = Scalar.coerce(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar._make(self.num + other.num, self.den)
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._make(-self.num, self.den)

    def __sub__(self, other):
        return self + (-Scalar.coerce(other) if not isinstance(other, int) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return Scalar._make(self.num * other, self.den)
        other = Scalar.coerce(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar._make(self.num * other.num, self.den)
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero scalar")
        return Scalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __pow__(self, k):
        if isinstance(k, Scalar):
            q = k.to_fraction()
            if q.denominator != 1:
                raise ValueError(f"non-integer exponent {k}")
            k = q.numerator
        if k < 0:
            return (ONE / self) ** (-k)
        return Scalar(self.num ** k, self.den ** k, reduced=True)

    # comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.num.to_dict().items())),
                               tuple(sorted(self.den.to_dict().items()))))
        return self._hash

    # printing
    def __str__(self):
        num = str(self.num)
        if self.den.is_one():
            return num
        return f"({num})/({self.den})"

    def __repr__(self):
        return f"Scalar({self})"

    def subs(self, bindings: dict) -> "Scalar":
        return scalar_specialize(self, bindings)

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        q = flint.fmpq(self.num.leading_coefficient()) if not self.num.is_zero() else flint.fmpq(0)
        return Fraction(int(q.p), int(q.q))


ZERO = Scalar(0)
ONE = Scalar(1)
EPS1 = Scalar(_CTX.gen(0))
EPS2 = Scalar(_CTX.gen(1))
ALPHA = Scalar(_CTX.gen(2))
HBAR = EPS1 + EPS2
HALF = Scalar(Fraction(1, 2))


def scalar(value) -> Scalar:
    """Build a scalar from an int, Fraction or a string like '(eps1-eps2)/2'."""
    if isinstance(value, str):
        return parse_scalar(value)
    return Scalar.coerce(value)


@lru_cache(maxsize=None)
def parse_scalar(text: str) -> Scalar:
    names = {"eps1": EPS1, "eps2": EPS2, "alpha": ALPHA, "hbar": HBAR}
    expr = text.replace("^", "**")
    allowed = set("0123456789+-*/() .")
    stripped = expr
    for name in names:
        stripped = stripped.replace(name, "")
    if set(stripped) - allowed:
        raise ValueError(f"cannot parse scalar {text!r}")
    # integer literals become Scalars so that '/' stays exact
    import re
    expr = re.sub(r"(?<![\w.])(\d+)", r"_S(\1)", expr)
    value = eval(expr, {"__builtins__": {}}, dict(names, _S=Scalar))
    return Scalar.coerce(value)


def _poly_at(poly, values) -> Scalar:
    total = ZERO
    for monom, coeff in poly.terms():
        term = Scalar(coeff)
        for v, e in zip(values, monom):
            if e:
                term = term * v ** e
        total = total + term
    return total


def scalar_specialize(x: Scalar, bindings: dict) -> Scalar:
    """Substitute values for some of eps1, eps2, alpha.

    Values may be ints, Fractions or Scalars (so ``{'eps2': -EPS1}`` works).
    """
    if not bindings:
        return x
    for name in bindings:
        if name not in VARIABLES:
            raise KeyError(f"unknown parameter {name!r}")
    gens = (EPS1, EPS2, ALPHA)
    values = [Scalar.coerce(bindings[name]) if name in bindings else g
              for name, g in zip(VARIABLES, gens)]
    if all(v.is_constant() for name, v in zip(VARIABLES, values) if name in bindings):
        sub = {}
        for name in bindings:
            q = values[VARIABLES.index(name)].to_fraction()
            sub[name] = flint.fmpq(q.numerator, q.denominator)
        num, den = x.num.subs(sub), x.den.subs(sub)
        if den.is_zero():
            raise ZeroDivisionError(f"specializing {x} at {bindings} zeroes the denominator")
        return Scalar(num, den)
    num, den = _poly_at(x.num, values), _poly_at(x.den, values)
    if den.is_zero():
        raise ZeroDivisionError(f"specializing {x} at {bindings} zeroes the denominator")
    return num / den


def sign_power(k: int) -> int:
    return -1 if k % 2 else 1
