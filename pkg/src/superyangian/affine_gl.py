"""The affine Lie superalgebra gl(m|n) (x) C[t, 1/t] + Cc + Cz.

A loop generator is either a matrix unit ``Unit(mode, row, col)`` standing
for E_{row,col} (x) t^mode, or one of the central symbols ``C`` and ``Z``.
Units compare as tuples, which is the PBW order used by :mod:`pbw`
(mode first, then row, then column).
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Union

from .foundation import ONE, RankData, Scalar, parity, sign, unit_parity

C = "c"
Z = "z"


class Unit(NamedTuple):
    mode: int
    row: int
    col: int

    def __repr__(self):
        return f"E{self.row},{self.col}({self.mode})"


LoopGen = Union[Unit, str]


def E(i: int, j: int, s: int = 0) -> Unit:
    return Unit(s, i, j)


def check_unit(ctx: RankData, g: Unit):
    if not (1 <= g.row <= ctx.size and 1 <= g.col <= ctx.size):
        raise IndexError(f"{g!r} has an index outside 1..{ctx.size}")


def gen_parity(ctx: RankData, g: LoopGen) -> int:
    if isinstance(g, str):
        return 0
    return unit_parity(ctx, g.row, g.col)


def supertrace_pair(ctx: RankData, a: int, b: int, c: int, d: int) -> int:
    """str(E_{a,b} E_{c,d})."""
    for k in (a, b, c, d):
        if not 1 <= k <= ctx.size:
            raise IndexError(f"matrix index {k} outside 1..{ctx.size}")
    if b == c and a == d:
        return sign(ctx, a)
    return 0


@lru_cache(maxsize=None)
def unit_bracket(ctx: RankData, x: Unit, y: Unit) -> tuple:
    """Super bracket of two matrix units as a tuple of (generator, int) pairs."""
    u, a, b = x
    v, c, d = y
    out = {}
    w = u + v
    if b == c:
        g = Unit(w, a, d)
        out[g] = out.get(g, 0) + 1
    if d == a:
        g = Unit(w, c, b)
        s = -1 if (unit_parity(ctx, a, b) and unit_parity(ctx, c, d)) else 1
        out[g] = out.get(g, 0) - s
    if w == 0 and u != 0:
        if b == c and a == d:
            out[C] = out.get(C, 0) + u * sign(ctx, a)
        if a == b and c == d:
            out[Z] = out.get(Z, 0) + u * sign(ctx, a) * sign(ctx, c)
    return tuple((g, k) for g, k in sorted(out.items(), key=_gen_key) if k)


def _gen_key(item):
    g = item[0]
    return (1, g, 0, 0) if isinstance(g, str) else (0, "", *g)


def gen_bracket(ctx: RankData, x: LoopGen, y: LoopGen) -> tuple:
    if isinstance(x, str) or isinstance(y, str):
        return ()
    return unit_bracket(ctx, x, y)


class LieElement:
    """Finite linear combination of loop generators."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RankData, terms=None):
        self.ctx = ctx
        self.terms = {}
        for g, k in (terms or {}).items():
            k = Scalar.coerce(k)
            if k:
                self.terms[g] = k

    @classmethod
    def gen(cls, ctx, g, coeff=ONE):
        return cls(ctx, {g: coeff})

    def __add__(self, other):
        out = dict(self.terms)
        for g, k in other.terms.items():
            out[g] = out.get(g, 0) + k if g in out else k
        return LieElement(self.ctx, out)

    def __neg__(self):
        return LieElement(self.ctx, {g: -k for g, k in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        k = Scalar.coerce(k)
        return LieElement(self.ctx, {g: k * v for g, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LieElement) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def parity(self):
        ps = {gen_parity(self.ctx, g) for g in self.terms}
        if len(ps) > 1:
            raise ValueError("inhomogeneous element")
        return ps.pop() if ps else 0

    def items(self):
        return sorted(self.terms.items(), key=_gen_key)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({k})*{g!r}" for g, k in self.items())


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Bilinear super bracket with the supertrace two-cocycle."""
    ctx = x.ctx
    out = {}
    for g, a in x.terms.items():
        for h, b in y.terms.items():
            ab = a * b
            for r, k in gen_bracket(ctx, g, h):
                out[r] = out[r] + ab * k if r in out else ab * k
    return LieElement(ctx, out)
