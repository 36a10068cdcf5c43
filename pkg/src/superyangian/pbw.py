"""Universal enveloping algebra of the affine gl(m|n): PBW normal ordering.

A PBW monomial is a triple ``(c_exp, z_exp, factors)`` where ``factors`` is
a nondecreasing tuple of :class:`~superyangian.affine_gl.Unit` in which no
odd unit repeats.  Elements are dicts from monomials to scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .affine_gl import C, Z, Unit, gen_parity, unit_bracket
from .foundation import ONE, ZERO, RankData, Scalar, sign


# ---------------------------------------------------------------------------
# straightening engine


class Straightener:
    """Normal ordering over an ordered basis with an integer bracket table.

    ``bracket(x, y)`` returns ``((g, k), ...)`` where ``g`` is a basis symbol
    or one of the central names ``'c'``/``'z'``; ``parity(x)`` gives 0/1.
    Basis symbols must be mutually comparable; the sort order is the PBW order.
    """

    def __init__(self, bracket, parity):
        self.bracket = bracket
        self.parity = parity
        self._gen_memo = {}
        self._word_memo = {}

    def times_gen(self, factors: tuple, g) -> dict:
        """Sorted monomial ``factors`` times generator ``g`` on the right."""
        key = (factors, g)
        memo = self._gen_memo
        if key in memo:
            return memo[key]
        if not factors:
            out = {(0, 0, (g,)): 1}
        else:
            x = factors[-1]
            if x < g:
                out = {(0, 0, factors + (g,)): 1}
            elif x == g:
                out = {} if self.parity(g) else {(0, 0, factors + (g,)): 1}
            else:
                out = {}
                prefix = factors[:-1]
                sgn = -1 if (self.parity(x) and self.parity(g)) else 1
                for (c1, z1, f1), k1 in self.times_gen(prefix, g).items():
                    for (c2, z2, f2), k2 in self.times_gen(f1, x).items():
                        _acc(out, (c1 + c2, z1 + z2, f2), sgn * k1 * k2)
                for h, kh in self.bracket(x, g):
                    if h == C:
                        _acc(out, (1, 0, prefix), kh)
                    elif h == Z:
                        _acc(out, (0, 1, prefix), kh)
                    else:
                        for (c1, z1, f1), k1 in self.times_gen(prefix, h).items():
                            _acc(out, (c1, z1, f1), kh * k1)
                out = {k: v for k, v in out.items() if v}
        memo[key] = out
        return out

    def order(self, word: tuple) -> dict:
        """Normal-ordered form of a word of basis symbols (integer coefficients)."""
        memo = self._word_memo
        if word in memo:
            return memo[word]
        if len(word) <= 1:
            out = {(0, 0, word): 1}
        elif all(word[i] < word[i + 1] for i in range(len(word) - 1)):
            out = {(0, 0, word): 1}
        else:
            out = {}
            for (c1, z1, f1), k1 in self.order(word[:-1]).items():
                for (c2, z2, f2), k2 in self.times_gen(f1, word[-1]).items():
                    _acc(out, (c1 + c2, z1 + z2, f2), k1 * k2)
            out = {k: v for k, v in out.items() if v}
        memo[word] = out
        return out

    def product(self, f1: tuple, f2: tuple) -> dict:
        if not f2:
            return {(0, 0, f1): 1}
        if not f1 or f1[-1] < f2[0]:
            return {(0, 0, f1 + f2): 1}
        return self.order(f1 + f2)


def _acc(d, key, val):
    if key in d:
        d[key] += val
    else:
        d[key] = val


@lru_cache(maxsize=None)
def straightener(ctx: RankData) -> Straightener:
    return Straightener(lambda x, y: unit_bracket(ctx, x, y),
                        lambda g: gen_parity(ctx, g))


# ---------------------------------------------------------------------------
# elements


def _mono_key(mono):
    c, z, f = mono
    return (len(f), f, c, z)


class AlgebraElement:
    """Finite combination of PBW monomials with scalar coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RankData, terms=None):
        self.ctx = ctx
        self.terms = terms if terms is not None else {}

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def one(cls, ctx, coeff=ONE):
        return cls.monomial(ctx, (), coeff)

    @classmethod
    def monomial(cls, ctx, factors=(), coeff=ONE, c=0, z=0):
        """A monomial; ``factors`` is normal-ordered first if needed."""
        return normal_order(ctx, tuple(factors), coeff) * _central(ctx, c, z)

    @classmethod
    def gen(cls, ctx, g, coeff=ONE):
        return normal_order(ctx, (g,), coeff)

    # arithmetic
    def copy(self):
        return AlgebraElement(self.ctx, dict(self.terms))

    def add_term(self, mono, coeff):
        """In-place accumulate (internal helper; drops zeros)."""
        t = self.terms
        if mono in t:
            v = t[mono] + coeff
            if v:
                t[mono] = v
            else:
                del t[mono]
        elif coeff:
            t[mono] = coeff

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement.one(self.ctx, Scalar.coerce(other))
        out = self.copy()
        for mono, k in other.terms.items():
            out.add_term(mono, k)
        return out

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.ctx, {m: -k for m, k in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k):
        k = Scalar.coerce(k) if not isinstance(k, int) else k
        if not k:
            return AlgebraElement(self.ctx, {})
        return AlgebraElement(self.ctx, {m: v * k for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, k):
        return self.scale(k)

    def __pow__(self, k):
        out = AlgebraElement.one(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = AlgebraElement.one(self.ctx, Scalar.coerce(other)) if other else AlgebraElement.zero(self.ctx)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: _mono_key(kv[0]))

    def parity_parts(self) -> dict:
        parts = {}
        for mono, k in self.terms.items():
            p = mono_parity(self.ctx, mono)
            parts.setdefault(p, AlgebraElement(self.ctx, {})).terms[mono] = k
        return parts

    def parity(self) -> int:
        parts = self.parity_parts()
        if len(parts) > 1:
            raise ValueError("element is not homogeneous")
        return next(iter(parts), 0)

    def map_coefficients(self, fn):
        out = AlgebraElement(self.ctx, {})
        for mono, k in self.terms.items():
            out.add_term(mono, fn(k))
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({k})*{format_monomial(m)}" for m, k in self.items())


def _central(ctx, c, z):
    return AlgebraElement(ctx, {(c, z, ()): ONE})


def format_monomial(mono) -> str:
    c, z, f = mono
    parts = []
    if c:
        parts.append("c" if c == 1 else f"c^{c}")
    if z:
        parts.append("z" if z == 1 else f"z^{z}")
    parts.extend(f"E{g.row},{g.col}({g.mode})" for g in f)
    return "*".join(parts) if parts else "1"


def mono_parity(ctx, mono) -> int:
    return sum(gen_parity(ctx, g) for g in mono[2]) % 2


def normal_order(ctx: RankData, word, coeff=ONE) -> AlgebraElement:
    """Product of a word of loop generators, as a canonical PBW element."""
    coeff = Scalar.coerce(coeff)
    c = z = 0
    units = []
    for g in word:
        if g == C:
            c += 1
        elif g == Z:
            z += 1
        else:
            units.append(g)
    out = AlgebraElement(ctx, {})
    if not coeff:
        return out
    for (c1, z1, f), k in straightener(ctx).order(tuple(units)).items():
        out.add_term((c + c1, z + z1, f), coeff * k)
    return out


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    ctx = x.ctx
    st = straightener(ctx)
    acc = {}
    for (c1, z1, f1), a in x.terms.items():
        for (c2, z2, f2), b in y.terms.items():
            for (c3, z3, f3), k in st.product(f1, f2).items():
                key = (c1 + c2 + c3, z1 + z2 + z3, f3)
                _acc(acc, key, (a * b) * k)
    return AlgebraElement(ctx, {m: v for m, v in acc.items() if v})


def _gen_bracket_word(ctx, g, word):
    """[g, w1 w2 ... wk] for a generator g, as a list of (c, z, word, sign*k)."""
    out = []
    pg = gen_parity(ctx, g)
    passed = 0
    for j, w in enumerate(word):
        sgn = -1 if (pg and passed) else 1
        for h, k in unit_bracket(ctx, g, w):
            rest = word[:j] + word[j + 1:]
            if h == C:
                out.append((1, 0, rest, sgn * k))
            elif h == Z:
                out.append((0, 1, rest, sgn * k))
            else:
                out.append((0, 0, word[:j] + (h,) + word[j + 1:], sgn * k))
        passed ^= gen_parity(ctx, w)
    return out


@lru_cache(maxsize=200000)
def _mono_bracket(ctx, a: tuple, b: tuple) -> tuple:
    """Super bracket of two PBW factor tuples via the super-Leibniz rule."""
    if not a or not b:
        return ()
    first, rest = a[0], a[1:]
    acc = {}
    st = straightener(ctx)
    # [a1 A', B] = a1 [A', B] + (-1)^{|A'||B|} [a1, B] A'
    for (c, z, f), k in _mono_bracket(ctx, rest, b):
        for (c2, z2, f2), k2 in st.product((first,), f).items():
            _acc(acc, (c + c2, z + z2, f2), k * k2)
    p_rest = sum(gen_parity(ctx, g) for g in rest) % 2
    p_b = sum(gen_parity(ctx, g) for g in b) % 2
    sgn = -1 if (p_rest and p_b) else 1
    for c, z, word, k in _gen_bracket_word(ctx, first, b):
        for (c2, z2, f2), k2 in st.order(word + rest).items():
            _acc(acc, (c + c2, z + z2, f2), sgn * k * k2)
    return tuple((m, v) for m, v in acc.items() if v)


def bracket_u(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Super commutator xy - (-1)^{|x||y|} yx, computed termwise by Leibniz."""
    ctx = x.ctx
    acc = {}
    for (c1, z1, f1), a in x.terms.items():
        for (c2, z2, f2), b in y.terms.items():
            br = _mono_bracket(ctx, f1, f2)
            if not br:
                continue
            ab = a * b
            for (c3, z3, f3), k in br:
                _acc(acc, (c1 + c2 + c3, z1 + z2 + z3, f3), ab * k)
    return AlgebraElement(ctx, {m: v for m, v in acc.items() if v})


def bracket_naive(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """The same super commutator from two products (used as a cross-check)."""
    out = AlgebraElement.zero(x.ctx)
    for px, xx in x.parity_parts().items():
        for py, yy in y.parity_parts().items():
            sgn = -1 if (px and py) else 1
            out = out + multiply(xx, yy) - multiply(yy, xx).scale(sgn)
    return out


def anticommutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return multiply(x, y) + multiply(y, x)


# ---------------------------------------------------------------------------
# degree and truncation


def degree(mono) -> int:
    return sum(g.mode for g in mono[2])


def max_abs_mode(x: AlgebraElement) -> int:
    return max((abs(g.mode) for m in x.terms for g in m[2]), default=0)


@dataclass(frozen=True)
class TruncationWindow:
    """Mode window [-N, N] and the tail-expansion bound S_max."""

    N: int
    S_max: int

    def __post_init__(self):
        if self.N < 0 or self.S_max < 0:
            raise ValueError("window bounds must be nonnegative")

    def check_guard(self, shift: int):
        """Enforce S_max >= N + shift + 1 for an expression with mode shift ``shift``."""
        need = self.N + shift + 1
        if self.S_max < need:
            raise ValueError(f"guard band violated: S_max={self.S_max} < N + A + 1 = {need}")

    @classmethod
    def guarded(cls, N: int, shift: int, extra: int = 0):
        return cls(N, N + shift + 1 + extra)


def in_window(mono, N: int) -> bool:
    return all(-N <= g.mode <= N for g in mono[2])


def truncate_project(x: AlgebraElement, w) -> AlgebraElement:
    N = w.N if isinstance(w, TruncationWindow) else int(w)
    return AlgebraElement(x.ctx, {m: k for m, k in x.terms.items() if in_window(m, N)})


# ---------------------------------------------------------------------------
# membership in U(sl-hat)
#
# Adapted basis symbols are tuples (block, mode, kind, i, j):
#   (0, s, 0, i, j)  off-diagonal E_{i,j}(s)            -- sl-hat
#   (0, s, 1, i, 0)  h_i(s) = D_i(s) - D_{i+1}(s)       -- sl-hat
#   (1, s, 2, 1, 1)  E_{1,1}(s)                          -- complement
# with D_a = (-1)^{p(a)} E_{a,a}.  c stays central in sl-hat, z is complement.


def _to_adapted(ctx, g: Unit) -> tuple:
    """A gl unit as ((symbol, int), ...) in the adapted basis."""
    s, a, b = g
    if a != b:
        return (((0, s, 0, a, b), 1),)
    # E_aa = (-1)^{p(a)} (E_11 - h_1 - ... - h_{a-1})
    sa = sign(ctx, a)
    out = [((1, s, 2, 1, 1), sa)]
    out.extend(((0, s, 1, i, 0), -sa) for i in range(1, a))
    return tuple(out)


def _from_adapted(ctx, sym) -> tuple:
    block, s, kind, i, j = sym
    if kind == 0:
        return ((Unit(s, i, j), 1),)
    if kind == 1:
        return ((Unit(s, i, i), sign(ctx, i)), (Unit(s, i + 1, i + 1), -sign(ctx, i + 1)))
    return ((Unit(s, 1, 1), 1),)


@lru_cache(maxsize=None)
def _adapted_straightener(ctx: RankData) -> Straightener:
    @lru_cache(maxsize=None)
    def br(x, y):
        acc = {}
        for gx, kx in _from_adapted(ctx, x):
            for gy, ky in _from_adapted(ctx, y):
                for h, k in unit_bracket(ctx, gx, gy):
                    if isinstance(h, str):
                        _acc(acc, h, kx * ky * k)
                    else:
                        for sym, ks in _to_adapted(ctx, h):
                            _acc(acc, sym, kx * ky * k * ks)
        return tuple(sorted(((g, k) for g, k in acc.items() if k),
                            key=lambda gk: (isinstance(gk[0], str), str(gk[0]) if isinstance(gk[0], str) else gk[0])))

    def par(sym):
        return gen_parity(ctx, Unit(sym[1], sym[3], sym[4])) if sym[2] == 0 else 0

    return Straightener(br, par)


def to_adapted(x: AlgebraElement) -> dict:
    """Rewrite x in the PBW basis adapted to sl-hat + span{E_11(s), z}."""
    ctx = x.ctx
    st = _adapted_straightener(ctx)
    acc = {}
    for (c, z, f), k in x.terms.items():
        words = [((), 1)]
        for g in f:
            words = [(w + (sym,), kw * ks) for w, kw in words for sym, ks in _to_adapted(ctx, g)]
        for w, kw in words:
            for (c2, z2, f2), k2 in st.order(w).items():
                _acc(acc, (c + c2, z + z2, f2), k * (kw * k2))
    return {m: v for m, v in acc.items() if v}


def sl_membership(x: AlgebraElement):
    """Return (is_member, sl_part, complement_part) in the adapted basis.

    ``sl_part`` and ``complement_part`` are dicts over adapted monomials;
    the element lies in U(sl-hat) exactly when the complement part is empty.
    """
    adapted = to_adapted(x)
    sl, rest = {}, {}
    for mono, k in adapted.items():
        c, z, f = mono
        if z == 0 and all(sym[0] == 0 for sym in f):
            sl[mono] = k
        else:
            rest[mono] = k
    return (not rest), sl, rest
