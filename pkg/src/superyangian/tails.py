"""Formal infinite sums over s >= 0 (tail families) and completion elements.

A tail family is ``coeff * sum_{idx >= 0} prod(weights) * prod(deltas) *
c^a z^b * X_1(idx) ... X_k(idx)`` where each factor ``X = (row, col, mode)``
has a mode that is an affine form in the summation indices.  Affine forms
are triples ``(cs, ct, const)`` meaning ``cs*s + ct*t + const``.

Canonical single-index families are PBW-ordered for every s >= 0 and are
extended downwards as far as the ordering allows; the boundary terms that
this moves around go into the finite part.  With that normalization two
completion elements are equal iff their canonical data coincide.
Two-index families (from brackets of two tails) are kept in raw form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import comb

from .affine_gl import C, Z, Unit, unit_bracket
from .foundation import ONE, RankData, Scalar, parse_scalar, sign, unit_parity
from .pbw import AlgebraElement, bracket_u, format_monomial, normal_order, straightener


class UnsupportedFamilyArity(ValueError):
    """A tail operation outside the supported family shapes."""


class NonConvergentFamily(ValueError):
    """A family whose terms do not form a degreewise-convergent sum."""


# ---------------------------------------------------------------------------
# affine forms

S = (1, 0, 0)
T = (0, 1, 0)


def const(k: int):
    return (0, 0, k)


def aff_add(f, g):
    return (f[0] + g[0], f[1] + g[1], f[2] + g[2])


def aff_eval(f, s=0, t=0):
    return f[0] * s + f[1] * t + f[2]


def aff_is_const(f):
    return f[0] == 0 and f[1] == 0


def aff_subst(f, s_to, t_to=None):
    """Substitute s -> s_to and t -> t_to (both affine forms)."""
    t_to = t_to if t_to is not None else T
    return (f[0] * s_to[0] + f[1] * t_to[0],
            f[0] * s_to[1] + f[1] * t_to[1],
            f[0] * s_to[2] + f[1] * t_to[2] + f[2])


def aff_str(f) -> str:
    parts = []
    for k, name in ((f[0], "s"), (f[1], "t")):
        if k == 0:
            continue
        if k == 1:
            parts.append(f"+{name}")
        elif k == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{k:+d}{name}")
    if f[2] or not parts:
        parts.append(f"{f[2]:+d}")
    out = "".join(parts)
    return out[1:] if out.startswith("+") else out


_AFF_TOKEN = re.compile(r"([+-]?)(\d*)([st]?)")


def aff_parse(text: str):
    cs = ct = k = 0
    text = text.replace(" ", "")
    pos = 0
    while pos < len(text):
        m = _AFF_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad affine form {text!r}")
        sgn = -1 if m.group(1) == "-" else 1
        digits, var = m.group(2), m.group(3)
        val = int(digits) if digits else 1
        if var == "s":
            cs += sgn * val
        elif var == "t":
            ct += sgn * val
        else:
            if not digits:
                raise ValueError(f"bad affine form {text!r}")
            k += sgn * val
        pos = m.end()
    return (cs, ct, k)


# ---------------------------------------------------------------------------
# symbolic units: (row, col, affine mode)


def sym(u: Unit):
    return (u.row, u.col, (0, 0, u.mode))


def sym_eval(x, s=0, t=0) -> Unit:
    return Unit(aff_eval(x[2], s, t), x[0], x[1])


def sym_str(x) -> str:
    return f"E{x[0]},{x[1]}({aff_str(x[2])})"


def sym_parity(ctx, x) -> int:
    return unit_parity(ctx, x[0], x[1])


def word_parity(ctx, word) -> int:
    return sum(unit_parity(ctx, x[0], x[1]) for x in word) % 2


def sym_unit_bracket(ctx: RankData, x, y):
    """[x, y] for symbolic units: list of (kind, unit_or_None, int, weight, delta).

    ``kind`` is 'u', 'c' or 'z'.  Central terms carry the cocycle weight (the
    mode of x) and a Kronecker delta on the total mode, unless these are
    constant, in which case they are folded into the integer.
    """
    a, b, f = x
    c, d, g = y
    w = aff_add(f, g)
    out = []
    if b == c:
        out.append(("u", (a, d, w), 1, None, None))
    if d == a:
        odd = unit_parity(ctx, a, b) and unit_parity(ctx, c, d)
        out.append(("u", (c, b, w), 1 if odd else -1, None, None))
    kc = sign(ctx, a) if (b == c and a == d) else 0
    kz = sign(ctx, a) * sign(ctx, c) if (a == b and c == d) else 0
    if kc or kz:
        if aff_is_const(w) and w[2] != 0:
            return out
        delta = None if aff_is_const(w) else w
        weight = f
        k = 1
        if aff_is_const(weight):
            k, weight = weight[2], None
        if k:
            if kc:
                out.append(("c", None, kc * k, weight, delta))
            if kz:
                out.append(("z", None, kz * k, weight, delta))
    return out


def sym_word_bracket(ctx: RankData, A: tuple, B: tuple) -> list:
    """Super-Leibniz expansion of [A, B] for words of symbolic units.

    Returns raw terms (c, z, word, int, weights, deltas).
    """
    if not A or not B:
        return []
    a1, rest = A[0], A[1:]
    out = []
    for c, z, w, k, wts, dls in sym_word_bracket(ctx, rest, B):
        out.append((c, z, (a1,) + w, k, wts, dls))
    sgn = -1 if (word_parity(ctx, rest) and word_parity(ctx, B)) else 1
    pa = sym_parity(ctx, a1)
    passed = 0
    for j, bj in enumerate(B):
        s2 = sgn * (-1 if (pa and passed) else 1)
        for kind, unit, k, wt, dl in sym_unit_bracket(ctx, a1, bj):
            wts = (wt,) if wt is not None else ()
            dls = (dl,) if dl is not None else ()
            if kind == "u":
                out.append((0, 0, B[:j] + (unit,) + B[j + 1:] + rest, s2 * k, wts, dls))
            else:
                c, z = (1, 0) if kind == "c" else (0, 1)
                out.append((c, z, B[:j] + B[j + 1:] + rest, s2 * k, wts, dls))
        passed ^= sym_parity(ctx, bj)
    return out


def _stable_key(x):
    return (x[2][0], x[2][2], x[0], x[1])


def sym_order(ctx: RankData, word: tuple, _memo={}):
    """Sort a single-index word into the large-s PBW order.

    Returns terms (c, z, word, int, weights, deltas); words of terms with a
    nonempty delta tuple are left unsorted (they are resolved to finite terms
    by the caller).
    """
    key = (ctx, word)
    if key in _memo:
        return _memo[key]
    out = None
    for i in range(len(word) - 1):
        x, y = word[i], word[i + 1]
        kx, ky = _stable_key(x), _stable_key(y)
        if kx > ky or (kx == ky and sym_parity(ctx, x)):
            if kx == ky:
                out = []
                break
            odd = sym_parity(ctx, x) and sym_parity(ctx, y)
            out = []
            for c, z, w, k, wts, dls in sym_order(ctx, word[:i] + (y, x) + word[i + 2:]):
                out.append((c, z, w, -k if odd else k, wts, dls))
            for kind, unit, k, wt, dl in sym_unit_bracket(ctx, x, y):
                wts = (wt,) if wt is not None else ()
                if kind == "u":
                    new = word[:i] + (unit,) + word[i + 2:]
                    cz = (0, 0)
                else:
                    new = word[:i] + word[i + 2:]
                    cz = (1, 0) if kind == "c" else (0, 1)
                if dl is not None:
                    out.append((cz[0], cz[1], new, k, wts, (dl,)))
                    continue
                for c, z, w, k2, wts2, dls2 in sym_order(ctx, new):
                    out.append((c + cz[0], z + cz[1], w, k * k2, wts + wts2, dls2))
            break
    if out is None:
        out = [(0, 0, word, 1, (), ())]
    _memo[key] = out
    return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class TailFamily:
    """One formal sum over s >= 0 (and t >= 0 when ``nidx == 2``)."""

    coeff: Scalar
    factors: tuple
    nidx: int = 1
    weights: tuple = ()
    deltas: tuple = ()
    c_exp: int = 0
    z_exp: int = 0

    def term_word(self, s, t=0):
        return tuple(sym_eval(x, s, t) for x in self.factors)

    def term_scalar(self, s, t=0) -> int:
        w = 1
        for f in self.weights:
            w *= aff_eval(f, s, t)
        for f in self.deltas:
            if aff_eval(f, s, t) != 0:
                return 0
        return w

    def max_shift(self) -> int:
        return max((abs(x[2][2]) for x in self.factors), default=0)

    def scaled(self, k):
        return TailFamily(self.coeff * k, self.factors, self.nidx, self.weights,
                          self.deltas, self.c_exp, self.z_exp)

    def __str__(self):
        return format_family(self)


def family(coeff, *factors, nidx=1, weights=(), deltas=(), c=0, z=0) -> TailFamily:
    """Convenience constructor: ``family(k, (1, 2, (-1, 0, 0)), (2, 1, S))``."""
    return TailFamily(Scalar.coerce(coeff), tuple(factors), nidx, tuple(weights),
                      tuple(deltas), c, z)


def _poly_shift(weights, s0):
    """Coefficients (ascending powers of u) of prod(weights) at s = u + s0."""
    poly = [1]
    for f in weights:
        a, b = f[0], f[0] * s0 + f[2]
        new = [0] * (len(poly) + 1)
        for i, p in enumerate(poly):
            new[i] += p * b
            new[i + 1] += p * a
        poly = new
    return poly


def _start_threshold(ctx, word) -> int:
    """Smallest s0 such that ``word`` (stable-sorted) is PBW-ordered for s >= s0."""
    s0 = None
    for x, y in zip(word, word[1:]):
        (sx, _, bx), (sy, _, by) = x[2], y[2]
        if sx == sy:
            continue
        # need (sx s + bx, rx, cx) <= (sy s + by, ry, cy), sy > sx
        diff = sy - sx
        num = bx - by
        q, r = divmod(num, diff)
        if r:
            need = q + 1
        else:
            need = q if (x[0], x[1]) <= (y[0], y[1]) else q + 1
        s0 = need if s0 is None else max(s0, need)
    if s0 is None:
        raise NonConvergentFamily("family pattern does not depend on the index")
    return s0


# ---------------------------------------------------------------------------
# completion elements


class CompletionElement:
    """Finite part plus canonical tail families.

    ``tails`` maps ``(c, z, k, word)`` to the coefficient of
    sum_{s>=0} s^k c^c z^z word(s); ``pairs`` holds raw two-index families
    keyed by ``(c, z, weights, deltas, word)``.
    """

    __slots__ = ("ctx", "finite", "tails", "pairs")

    def __init__(self, ctx: RankData, finite=None, tails=None, pairs=None):
        self.ctx = ctx
        self.finite = finite if finite is not None else AlgebraElement.zero(ctx)
        self.tails = tails if tails is not None else {}
        self.pairs = pairs if pairs is not None else {}

    # construction
    @classmethod
    def from_parts(cls, ctx, finite=None, families=()):
        out = cls(ctx, finite.copy() if finite is not None else None)
        for fam in families:
            _absorb(out, fam)
        return out

    @classmethod
    def of(cls, x: AlgebraElement):
        return cls(x.ctx, x.copy())

    def copy(self):
        return CompletionElement(self.ctx, self.finite.copy(), dict(self.tails), dict(self.pairs))

    # inspection
    def families(self) -> list:
        out = []
        for (c, z, k, word), coeff in sorted(self.tails.items(), key=_tail_sort):
            out.append(TailFamily(coeff, word, 1, (S,) * k, (), c, z))
        for (c, z, wts, dls, word), coeff in sorted(self.pairs.items(), key=_pair_sort):
            out.append(TailFamily(coeff, word, 2, wts, dls, c, z))
        return out

    def is_finite(self):
        return not self.tails and not self.pairs

    def is_zero(self):
        return self.finite.is_zero() and not self.tails and not self.pairs

    def __bool__(self):
        return not self.is_zero()

    def max_shift(self) -> int:
        return max((f.max_shift() for f in self.families()), default=0)

    def max_finite_mode(self) -> int:
        return max((abs(g.mode) for m in self.finite.terms for g in m[2]), default=0)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            other = CompletionElement.of(other)
        out = self.copy()
        out.finite = out.finite + other.finite
        for key, k in other.tails.items():
            _acc_scalar(out.tails, key, k)
        for key, k in other.pairs.items():
            _acc_scalar(out.pairs, key, k)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, AlgebraElement):
            other = CompletionElement.of(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k):
        if not isinstance(k, int):
            k = Scalar.coerce(k)
        if not k:
            return CompletionElement(self.ctx)
        return CompletionElement(self.ctx, self.finite.scale(k),
                                 {key: v * k for key, v in self.tails.items()},
                                 {key: v * k for key, v in self.pairs.items()})

    def __mul__(self, other):
        if isinstance(other, (CompletionElement, AlgebraElement)):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(CompletionElement.of(other), self)
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            other = CompletionElement.of(other)
        if not isinstance(other, CompletionElement):
            return NotImplemented
        return (self.finite == other.finite and self.tails == other.tails
                and self.pairs == other.pairs)

    def map_coefficients(self, fn):
        out = CompletionElement(self.ctx, self.finite.map_coefficients(fn))
        for key, v in self.tails.items():
            _acc_scalar(out.tails, key, fn(v))
        for key, v in self.pairs.items():
            _acc_scalar(out.pairs, key, fn(v))
        return out

    def parity(self) -> int:
        ps = set(self.finite.parity_parts())
        ps |= {word_parity(self.ctx, key[3]) for key in self.tails}
        ps |= {word_parity(self.ctx, key[4]) for key in self.pairs}
        if len(ps) > 1:
            raise ValueError("element is not homogeneous")
        return ps.pop() if ps else 0

    def parity_parts(self) -> dict:
        parts = {}
        for p, x in self.finite.parity_parts().items():
            parts.setdefault(p, CompletionElement(self.ctx)).finite = x
        for key, v in self.tails.items():
            p = word_parity(self.ctx, key[3])
            parts.setdefault(p, CompletionElement(self.ctx)).tails[key] = v
        for key, v in self.pairs.items():
            p = word_parity(self.ctx, key[4])
            parts.setdefault(p, CompletionElement(self.ctx)).pairs[key] = v
        return parts

    def __repr__(self):
        return dump(self)


def _tail_sort(item):
    (c, z, k, word), _ = item
    return (len(word), tuple(_stable_key(x) for x in word), c, z, k)


def _pair_sort(item):
    (c, z, wts, dls, word), _ = item
    return (len(word), tuple((x[2], x[0], x[1]) for x in word), c, z, wts, dls)


def _acc_scalar(d, key, val):
    if key in d:
        v = d[key] + val
        if v:
            d[key] = v
        else:
            del d[key]
    elif val:
        d[key] = val


# ---------------------------------------------------------------------------
# canonicalization


def resolve_deltas(ctx: RankData, fam: TailFamily) -> CompletionElement:
    """Eliminate the Kronecker deltas of a family.

    A delta either pins an index to one admissible value (the family drops to
    a finite term or loses an index) or has no admissible solution.
    """
    out = CompletionElement(ctx)
    _resolve_into(out, fam)
    return out


def _resolve_into(out, fam):
    """Absorb ``fam`` (which has at least one delta) into ``out``."""
    ctx = out.ctx
    dl = fam.deltas[0]
    rest = fam.deltas[1:]
    if aff_is_const(dl):
        if dl[2] == 0:
            _absorb(out, TailFamily(fam.coeff, fam.factors, fam.nidx, fam.weights, rest,
                                    fam.c_exp, fam.z_exp))
        return
    cs, ct, k = dl
    if fam.nidx == 1 or ct == 0:
        # pin s (one-index family, or a delta free of t)
        if k % cs:
            return
        s = -k // cs
        if s < 0:
            return
        sub = (0, 0, s)
        if fam.nidx == 1:
            _absorb_substituted(out, fam, sub, None, 1, rest)
        else:
            _absorb_substituted(out, fam, sub, T, 2, rest, relabel_t=True)
        return
    if cs == 0:
        if k % ct:
            return
        t = -k // ct
        if t < 0:
            return
        _absorb_substituted(out, fam, S, (0, 0, t), 1, rest)
        return
    # both indices: solve for t = a s + b
    if ct not in (1, -1):
        raise UnsupportedFamilyArity("delta with non-unit coefficient on t")
    a, b = -cs * ct, -k * ct
    if a not in (1, -1):
        raise UnsupportedFamilyArity("delta with non-unit slope")
    t_form = (a, 0, b)
    if a == 1:
        lo = max(0, -b)
        # s = u + lo, t = u + lo + b
        _absorb_substituted(out, fam, (1, 0, lo), (1, 0, lo + b), 1, rest)
    else:
        for s in range(0, b + 1):
            _absorb_substituted(out, fam, (0, 0, s), (0, 0, b - s), 1, rest)


def _absorb_substituted(out, fam, s_to, t_to, nidx, rest, relabel_t=False):
    """Substitute index forms, then absorb; with relabel_t the t index becomes s."""
    def tr(f):
        g = aff_subst(f, s_to, t_to)
        if relabel_t:
            g = (g[1], 0, g[2])
        return g
    factors = tuple((x[0], x[1], tr(x[2])) for x in fam.factors)
    weights = tuple(tr(f) for f in fam.weights)
    deltas = tuple(tr(f) for f in rest)
    if all(aff_is_const(x[2]) for x in factors) and all(aff_is_const(f) for f in weights + deltas):
        nidx = 0
    _absorb(out, TailFamily(fam.coeff, factors, nidx, weights, deltas, fam.c_exp, fam.z_exp))


def _absorb(out: CompletionElement, fam: TailFamily):
    """Add one raw family (any shape) to ``out`` in canonical form."""
    if not fam.coeff:
        return
    ctx = out.ctx
    if fam.nidx == 0:
        k = fam.term_scalar(0)
        if k:
            word = (C,) * fam.c_exp + (Z,) * fam.z_exp + fam.term_word(0)
            out.finite = out.finite + normal_order(ctx, word, fam.coeff * k)
        return
    if fam.deltas:
        _resolve_into(out, fam)
        return
    if fam.nidx == 2:
        _absorb_pair(out, fam)
        return
    for c, z, word, k, wts, dls in sym_order(ctx, fam.factors):
        sub = TailFamily(fam.coeff * k, word, 1, fam.weights + wts, dls,
                         fam.c_exp + c, fam.z_exp + z)
        if dls:
            _resolve_into(out, sub)
        else:
            _absorb_sorted(out, sub)


def _absorb_sorted(out, fam):
    ctx = out.ctx
    word = fam.factors
    if sum(x[2][0] for x in word) != 0:
        raise NonConvergentFamily(f"family {format_family(fam)} has index-dependent degree")
    if any(f[1] for f in fam.weights):
        raise UnsupportedFamilyArity("single-index family with a t-weight")
    s0 = _start_threshold(ctx, word)
    # boundary terms
    cz = (C,) * fam.c_exp + (Z,) * fam.z_exp
    if s0 > 0:
        for s in range(0, s0):
            k = fam.term_scalar(s)
            if k:
                out.finite = out.finite + normal_order(ctx, cz + fam.term_word(s), fam.coeff * k)
    elif s0 < 0:
        for s in range(s0, 0):
            k = fam.term_scalar(s)
            if k:
                out.finite = out.finite - normal_order(ctx, cz + fam.term_word(s), fam.coeff * k)
    rebased = tuple((x[0], x[1], (x[2][0], 0, x[2][0] * s0 + x[2][2])) for x in word)
    poly = _poly_shift(fam.weights, s0)
    for power, k in enumerate(poly):
        if k:
            _acc_scalar(out.tails, (fam.c_exp, fam.z_exp, power, rebased), fam.coeff * k)


def _swap_st(f):
    return (f[1], f[0], f[2])


def _absorb_pair(out, fam):
    word = fam.factors
    if not any(x[2][1] for x in word) or not any(x[2][0] for x in word):
        raise UnsupportedFamilyArity("two-index family that does not use both indices")
    key1 = (fam.c_exp, fam.z_exp, tuple(sorted(fam.weights)), tuple(sorted(fam.deltas)), word)
    swapped = tuple((x[0], x[1], _swap_st(x[2])) for x in word)
    key2 = (fam.c_exp, fam.z_exp, tuple(sorted(_swap_st(f) for f in fam.weights)),
            tuple(sorted(_swap_st(f) for f in fam.deltas)), swapped)
    key = min(key1, key2, key=lambda kk: repr(kk))
    _acc_scalar(out.pairs, key, fam.coeff)


def canonicalize(x: CompletionElement) -> CompletionElement:
    """Re-derive the canonical form from the families of ``x`` (idempotent)."""
    out = CompletionElement(x.ctx, x.finite.copy())
    for fam in x.families():
        _absorb(out, fam)
    return out


# ---------------------------------------------------------------------------
# brackets


def family_bracket_finite(fam: TailFamily, x: AlgebraElement) -> CompletionElement:
    """[F, x] for one family F and a finite element x (Leibniz, then canonicalize)."""
    ctx = x.ctx
    out = CompletionElement(ctx)
    _bracket_family_finite_into(out, fam, x)
    return out


def _bracket_family_finite_into(out, fam, x, sgn=1):
    ctx = out.ctx
    if fam.nidx != 1:
        raise UnsupportedFamilyArity("bracket of a two-index family")
    for (c, z, f), k in x.terms.items():
        xw = tuple(sym(g) for g in f)
        for c2, z2, word, kk, wts, dls in sym_word_bracket(ctx, fam.factors, xw):
            _absorb(out, TailFamily(fam.coeff * k * (sgn * kk), word, 1,
                                    fam.weights + wts, fam.deltas + dls,
                                    fam.c_exp + c + c2, fam.z_exp + z + z2))


def family_bracket_family(ctx: RankData, f: TailFamily, g: TailFamily) -> CompletionElement:
    """[F, G] for two single-index families: delta-linked parts become
    single-index families, the rest stays as two-index families."""
    if f.nidx != 1 or g.nidx != 1:
        raise UnsupportedFamilyArity("unsupported family arity")
    if len(f.factors) > 2 or len(g.factors) > 2:
        raise UnsupportedFamilyArity("unsupported family arity: only quadratic families")
    out = CompletionElement(ctx)
    _bracket_families_into(out, f, g)
    return out


def _bracket_families_into(out, f, g):
    ctx = out.ctx
    gw = tuple((x[0], x[1], _swap_st(x[2])) for x in g.factors)
    g_wts = tuple(_swap_st(w) for w in g.weights)
    g_dls = tuple(_swap_st(w) for w in g.deltas)
    for c, z, word, k, wts, dls in sym_word_bracket(ctx, f.factors, gw):
        _absorb(out, TailFamily(f.coeff * g.coeff * k, word, 2,
                                f.weights + g_wts + wts, f.deltas + g_dls + dls,
                                f.c_exp + g.c_exp + c, f.z_exp + g.z_exp + z))


def bracket(x, y) -> CompletionElement:
    """Super bracket of two completion elements (or finite elements)."""
    if isinstance(x, AlgebraElement):
        x = CompletionElement.of(x)
    if isinstance(y, AlgebraElement):
        y = CompletionElement.of(y)
    ctx = x.ctx
    if x.pairs or y.pairs:
        raise UnsupportedFamilyArity("bracket involving a two-index family")
    out = CompletionElement(ctx, bracket_u(x.finite, y.finite))
    xf, yf = x.families(), y.families()
    for fam in xf:
        _bracket_family_finite_into(out, fam, y.finite)
    if yf:
        for px, xx in x.finite.parity_parts().items():
            for fam in yf:
                pf = word_parity(ctx, fam.factors)
                sgn = 1 if (px and pf) else -1
                _bracket_family_finite_into(out, fam, xx, sgn)
    for f in xf:
        for g in yf:
            if len(f.factors) > 2 or len(g.factors) > 2:
                raise UnsupportedFamilyArity("unsupported family arity: only quadratic families")
            _bracket_families_into(out, f, g)
    return out


def multiply(x, y) -> CompletionElement:
    """Product; tails may only be multiplied by scalars (finite x finite otherwise)."""
    if isinstance(x, AlgebraElement):
        x = CompletionElement.of(x)
    if isinstance(y, AlgebraElement):
        y = CompletionElement.of(y)
    if x.is_finite() and y.is_finite():
        return CompletionElement(x.ctx, x.finite * y.finite)
    out = CompletionElement(x.ctx, x.finite * y.finite)
    for fam, other, left in [(f, y.finite, True) for f in x.families()] + \
                            [(f, x.finite, False) for f in y.families()]:
        if fam.nidx != 1:
            raise UnsupportedFamilyArity("product involving a two-index family")
        for (c, z, w), k in other.terms.items():
            ow = tuple(sym(g) for g in w)
            word = fam.factors + ow if left else ow + fam.factors
            _absorb(out, TailFamily(fam.coeff * k, word, 1, fam.weights, fam.deltas,
                                    fam.c_exp + c, fam.z_exp + z))
    if x.tails and y.tails:
        raise UnsupportedFamilyArity("product of two tails")
    return out


def anticommutator(x, y) -> CompletionElement:
    return multiply(x, y) + multiply(y, x)


# ---------------------------------------------------------------------------
# truncation oracle


def expand_family(ctx: RankData, fam: TailFamily, S_max: int) -> AlgebraElement:
    out = AlgebraElement.zero(ctx)
    cz = (C,) * fam.c_exp + (Z,) * fam.z_exp
    trange = range(S_max + 1) if fam.nidx == 2 else (0,)
    for s in range(S_max + 1):
        for t in trange:
            k = fam.term_scalar(s, t)
            if k:
                out = out + normal_order(ctx, cz + fam.term_word(s, t), fam.coeff * k)
    return out


def expand(x: CompletionElement, S_max: int) -> AlgebraElement:
    """Finite part plus every family summed over indices 0..S_max."""
    if S_max < 0:
        raise ValueError("S_max must be nonnegative")
    out = x.finite.copy()
    for fam in x.families():
        out = out + expand_family(x.ctx, fam, S_max)
    return out


def expand_raw(ctx, families, finite=None, S_max=0) -> AlgebraElement:
    out = finite.copy() if finite is not None else AlgebraElement.zero(ctx)
    for fam in families:
        out = out + expand_family(ctx, fam, S_max)
    return out


def specialize_centrals(x: CompletionElement, c_value: Scalar, z_value: Scalar = ONE) -> CompletionElement:
    """Replace central exponents c^a z^b by the scalar c_value^a z_value^b."""
    ctx = x.ctx
    fin = AlgebraElement.zero(ctx)
    for (c, z, f), k in x.finite.terms.items():
        fin.add_term((0, 0, f), k * (c_value ** c) * (z_value ** z))
    out = CompletionElement(ctx, fin)
    for (c, z, p, word), k in x.tails.items():
        _acc_scalar(out.tails, (0, 0, p, word), k * (c_value ** c) * (z_value ** z))
    for (c, z, wts, dls, word), k in x.pairs.items():
        _acc_scalar(out.pairs, (0, 0, wts, dls, word), k * (c_value ** c) * (z_value ** z))
    return out


# ---------------------------------------------------------------------------
# text serialization
#
#   F <TAB> coeff <TAB> monomial
#   T1 <TAB> coeff <TAB> weights <TAB> deltas <TAB> centrals <TAB> factors
#   T2 ... (same fields, two indices s, t)
#
# weights/deltas are ';'-separated affine forms ("-" if none), centrals are
# "c^a z^b", factors are space-separated "E<row>,<col>(<affine>)".

HEADER = "# completion-element v1"


def format_family(fam: TailFamily) -> str:
    wts = ";".join(aff_str(f) for f in fam.weights) or "-"
    dls = ";".join(aff_str(f) for f in fam.deltas) or "-"
    facs = " ".join(sym_str(x) for x in fam.factors) or "1"
    return f"T{fam.nidx}\t{fam.coeff}\t{wts}\t{dls}\tc^{fam.c_exp} z^{fam.z_exp}\t{facs}"


def dump(x: CompletionElement) -> str:
    lines = [HEADER]
    for mono, k in x.finite.items():
        lines.append(f"F\t{k}\t{format_monomial(mono)}")
    for fam in x.families():
        lines.append(format_family(fam))
    return "\n".join(lines) + "\n"


_FACTOR = re.compile(r"E(\d+),(\d+)\(([^)]*)\)")


def _parse_monomial(text):
    c = z = 0
    units = []
    if text == "1":
        return c, z, ()
    for part in text.split("*"):
        if part.startswith("c"):
            c += int(part[2:]) if part.startswith("c^") else 1
        elif part.startswith("z"):
            z += int(part[2:]) if part.startswith("z^") else 1
        else:
            m = _FACTOR.fullmatch(part)
            if not m:
                raise ValueError(f"bad factor {part!r}")
            units.append(Unit(int(m.group(3)), int(m.group(1)), int(m.group(2))))
    return c, z, tuple(units)


def load(ctx: RankData, text: str) -> CompletionElement:
    finite = AlgebraElement.zero(ctx)
    fams = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "F":
            finite.add_term(_parse_monomial(fields[2]), parse_scalar(fields[1]))
        elif fields[0] in ("T1", "T2"):
            _, coeff, wts, dls, cz, facs = fields
            wts = () if wts == "-" else tuple(aff_parse(w) for w in wts.split(";"))
            dls = () if dls == "-" else tuple(aff_parse(w) for w in dls.split(";"))
            cpart, zpart = cz.split()
            factors = () if facs == "1" else tuple(
                (int(m.group(1)), int(m.group(2)), aff_parse(m.group(3)))
                for m in _FACTOR.finditer(facs))
            fams.append(TailFamily(parse_scalar(coeff), factors, int(fields[0][1]), wts, dls,
                                   int(cpart[2:]), int(zpart[2:])))
        else:
            raise ValueError(f"unknown record {fields[0]!r}")
    return CompletionElement.from_parts(ctx, finite, fams)
