"""Relations of the minimalistic presentation, as data, and a checker.

Relations are small expression trees over Yangian generators.  An
assignment maps generators to completion elements; ``evaluate_relation``
substitutes and decides ``lhs == rhs`` either exactly (canonical tail
forms) or on a guarded truncation window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

from .foundation import (EPS1, EPS2, HALF, HBAR, ONE, RankData, Scalar, cartan_a,
                         cartan_m)
from .pbw import (AlgebraElement, TruncationWindow, anticommutator, bracket_u,
                  format_monomial, truncate_project)
from .tails import (CompletionElement, UnsupportedFamilyArity, bracket, dump, expand,
                    multiply, specialize_centrals)

EPS_DIFF_HALF = (EPS1 - EPS2) * HALF
HBAR_HALF = HBAR * HALF


class YangianGenerator(NamedTuple):
    kind: str     # 'x+', 'x-' or 'h'
    node: int
    level: int

    def parity(self, ctx: RankData) -> int:
        return 1 if (self.kind != "h" and self.node in (0, ctx.m)) else 0

    def __str__(self):
        return f"{self.kind}_{{{self.node},{self.level}}}"


def xgen(pm: int, i: int, r: int) -> YangianGenerator:
    return YangianGenerator("x+" if pm > 0 else "x-", i, r)


def hgen(i: int, r: int) -> YangianGenerator:
    return YangianGenerator("h", i, r)


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Gen:
    g: YangianGenerator

    def __str__(self):
        return str(self.g)


@dataclass(frozen=True)
class Br:
    a: object
    b: object

    def __str__(self):
        return f"[{self.a}, {self.b}]"


@dataclass(frozen=True)
class Anti:
    a: object
    b: object

    def __str__(self):
        return f"{{{self.a}, {self.b}}}"


@dataclass(frozen=True)
class Prod:
    a: object
    b: object

    def __str__(self):
        return f"{self.a}*{self.b}"


@dataclass(frozen=True)
class Lin:
    """Linear combination: tuple of (Scalar, expression)."""
    terms: tuple

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({k})*{e}" for k, e in self.terms)


ZERO_EXPR = Lin(())


def lin(*pairs) -> Lin:
    return Lin(tuple((Scalar.coerce(k), e) for k, e in pairs if Scalar.coerce(k)))


def htilde(i: int) -> Lin:
    """h~_{i,1} = h_{i,1} - (hbar/2) h_{i,0}^2."""
    h0 = Gen(hgen(i, 0))
    return lin((ONE, Gen(hgen(i, 1))), (-HBAR_HALF, Prod(h0, h0)))


def generators_of(expr) -> set:
    if isinstance(expr, Gen):
        return {expr.g}
    if isinstance(expr, Lin):
        return set().union(*(generators_of(e) for _, e in expr.terms)) if expr.terms else set()
    return generators_of(expr.a) | generators_of(expr.b)


RELATION_DESCRIPTIONS = {
    "h-commute": "Cartan generators commute",
    "x-pair-0": "[x+_{i,0}, x-_{j,0}] = delta_ij h_{i,0}",
    "x-pair-1": "[x+_{i,1}, x-_{j,0}] = delta_ij h_{i,1}",
    "h-weight": "[h_{i,0}, x+-_{j,r}] = +-a_ij x+-_{j,r}",
    "htilde-weight": "[h~_{i,1}, x+-_{j,0}] = +-a_ij x+-_{j,1}",
    "x-shift": "level-one shift of [x+-_i, x+-_j]",
    "serre": "Serre relation",
    "odd-square": "odd root vector squares to zero",
    "odd-quartic": "quartic Serre relation at an odd node",
}


@dataclass(frozen=True)
class Relation:
    id: str
    params: tuple
    lhs: object
    rhs: object

    @property
    def anchor(self) -> str:
        return RELATION_DESCRIPTIONS[self.id]

    @property
    def label(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.id}[{ps}]"

    def generators(self) -> set:
        return generators_of(self.lhs) | generators_of(self.rhs)

    def __str__(self):
        return f"{self.label}: {self.lhs} = {self.rhs}"


def minimal_relations(ctx: RankData) -> list:
    """All instances of the level <= 1 defining relations, in a fixed order."""
    N = ctx.size
    nodes = range(N)
    rels = []
    # unordered pairs of distinct h generators
    hs = [(i, r) for r in (0, 1) for i in nodes]
    for (i, r), (j, s) in itertools.combinations(hs, 2):
        rels.append(Relation("h-commute", (("i", i), ("r", r), ("j", j), ("s", s)),
                             Br(Gen(hgen(i, r)), Gen(hgen(j, s))), ZERO_EXPR))
    for i in nodes:
        for j in nodes:
            rhs = Gen(hgen(i, 0)) if i == j else ZERO_EXPR
            rels.append(Relation("x-pair-0", (("i", i), ("j", j)),
                                 Br(Gen(xgen(1, i, 0)), Gen(xgen(-1, j, 0))), rhs))
    for i in nodes:
        for j in nodes:
            rhs = Gen(hgen(i, 1)) if i == j else ZERO_EXPR
            rels.append(Relation("x-pair-1", (("i", i), ("j", j), ("side", "x+1")),
                                 Br(Gen(xgen(1, i, 1)), Gen(xgen(-1, j, 0))), rhs))
            rels.append(Relation("x-pair-1", (("i", i), ("j", j), ("side", "x-1")),
                                 Br(Gen(xgen(1, i, 0)), Gen(xgen(-1, j, 1))), rhs))
    for i in nodes:
        for j in nodes:
            a = cartan_a(ctx, i, j)
            for pm in (1, -1):
                for r in (0, 1):
                    x = Gen(xgen(pm, j, r))
                    rels.append(Relation("h-weight", (("i", i), ("j", j), ("pm", pm), ("r", r)),
                                         Br(Gen(hgen(i, 0)), x), lin((pm * a, x))))
    for i in nodes:
        for j in nodes:
            a, mm = cartan_a(ctx, i, j), cartan_m(ctx, i, j)
            for pm in (1, -1):
                rhs = lin((pm * a, Gen(xgen(pm, j, 1))),
                          (-(pm * a * mm) * EPS_DIFF_HALF, Gen(xgen(pm, j, 0))))
                rels.append(Relation("htilde-weight", (("i", i), ("j", j), ("pm", pm)),
                                     Br(htilde(i), Gen(xgen(pm, j, 0))), rhs))
    for i in nodes:
        for j in nodes:
            a, mm = cartan_a(ctx, i, j), cartan_m(ctx, i, j)
            for pm in (1, -1):
                xi0, xj0 = Gen(xgen(pm, i, 0)), Gen(xgen(pm, j, 0))
                lhs = lin((ONE, Br(Gen(xgen(pm, i, 1)), xj0)),
                          (-ONE, Br(xi0, Gen(xgen(pm, j, 1)))))
                rhs = lin((pm * a * HBAR_HALF, Anti(xi0, xj0)),
                          (-mm * EPS_DIFF_HALF, Br(xi0, xj0)))
                rels.append(Relation("x-shift", (("i", i), ("j", j), ("pm", pm)), lhs, rhs))
    for i in nodes:
        for j in nodes:
            if i == j:
                continue
            power = 1 + abs(cartan_a(ctx, i, j))
            for pm in (1, -1):
                expr = Gen(xgen(pm, j, 0))
                for _ in range(power):
                    expr = Br(Gen(xgen(pm, i, 0)), expr)
                rels.append(Relation("serre", (("i", i), ("j", j), ("pm", pm)), expr, ZERO_EXPR))
    for i in (0, ctx.m):
        for pm in (1, -1):
            x = Gen(xgen(pm, i, 0))
            rels.append(Relation("odd-square", (("i", i), ("pm", pm)), Br(x, x), ZERO_EXPR))
    for i in (0, ctx.m):
        for pm in (1, -1):
            prev, cur, nxt = (Gen(xgen(pm, (i - 1) % N, 0)), Gen(xgen(pm, i, 0)),
                              Gen(xgen(pm, (i + 1) % N, 0)))
            rels.append(Relation("odd-quartic", (("i", i), ("pm", pm)),
                                 Br(Br(prev, cur), Br(cur, nxt)), ZERO_EXPR))
    return rels


# ---------------------------------------------------------------------------
# assignments


class Assignment(dict):
    """Map YangianGenerator -> CompletionElement (formal centrals)."""

    def __init__(self, ctx: RankData, images=None, c_value=None):
        super().__init__(images or {})
        self.ctx = ctx
        self.c_value = c_value   # value substituted for c when checking

    def copy(self):
        return Assignment(self.ctx, dict(self), self.c_value)

    def check_parities(self):
        for g, x in self.items():
            if not x.is_zero() and x.parity() != g.parity(self.ctx):
                raise ValueError(f"image of {g} has the wrong parity")


def raise_x(asg: Assignment, pm: int, i: int, r: int) -> CompletionElement:
    """Image of x^pm_{i,r+1} from level r by the mode recursion."""
    ctx = asg.ctx
    x = asg[xgen(pm, i, r)]
    if i in (0, ctx.m):
        k = (i + 1) % ctx.size
        a = cartan_a(ctx, k, i)
        ht = evaluate_symbolic(htilde(k), asg)
        out = bracket(ht, x).scale(Scalar(pm) / a)
        return out + x.scale(cartan_m(ctx, k, i) * EPS_DIFF_HALF)
    a = cartan_a(ctx, i, i)
    ht = evaluate_symbolic(htilde(i), asg)
    return bracket(ht, x).scale(Scalar(pm) / a)


def raise_h(asg: Assignment, i: int, r: int) -> CompletionElement:
    """Image of h_{i,r} as [x+_{i,r}, x-_{i,0}]."""
    return bracket(asg[xgen(1, i, r)], asg[xgen(-1, i, 0)])


MAX_LEVEL = 3


def higher_modes(asg: Assignment, r_max: int, mode="symbolic", S_max=None) -> Assignment:
    """Extend an assignment on levels 0, 1 to levels <= r_max.

    In truncated mode the new images are expanded AlgebraElements wrapped as
    finite completion elements (``S_max`` must be given).
    """
    if r_max > MAX_LEVEL:
        raise ValueError(f"r_max={r_max} exceeds the resource guard ({MAX_LEVEL})")
    out = asg.copy()
    ctx = asg.ctx
    if mode == "truncated":
        if S_max is None:
            raise ValueError("truncated mode needs S_max")
        out = Assignment(ctx, {g: CompletionElement.of(expand(x, S_max)) for g, x in asg.items()},
                         asg.c_value)
    for r in range(1, r_max):
        for i in range(ctx.size):
            for pm in (1, -1):
                if xgen(pm, i, r + 1) not in out:
                    out[xgen(pm, i, r + 1)] = _raise_x_any(out, pm, i, r, mode)
        for i in range(ctx.size):
            if hgen(i, r + 1) not in out:
                out[hgen(i, r + 1)] = _br_any(out[xgen(1, i, r + 1)], out[xgen(-1, i, 0)], mode)
    return out


def _br_any(x, y, mode):
    if mode == "truncated":
        return CompletionElement.of(bracket_u(x.finite, y.finite))
    return bracket(x, y)


def _raise_x_any(asg, pm, i, r, mode):
    if mode != "truncated":
        return raise_x(asg, pm, i, r)
    ctx = asg.ctx
    x = asg[xgen(pm, i, r)].finite
    k = (i + 1) % ctx.size if i in (0, ctx.m) else i
    h1 = asg[hgen(k, 1)].finite
    h0 = asg[hgen(k, 0)].finite
    ht = h1 - (h0 * h0).scale(HBAR_HALF)
    out = bracket_u(ht, x).scale(Scalar(pm) / cartan_a(ctx, k, i))
    if i in (0, ctx.m):
        out = out + x.scale(cartan_m(ctx, k, i) * EPS_DIFF_HALF)
    return CompletionElement.of(out)


# ---------------------------------------------------------------------------
# evaluation


def evaluate_symbolic(expr, asg: Assignment) -> CompletionElement:
    ctx = asg.ctx
    if isinstance(expr, Gen):
        if expr.g not in asg:
            raise KeyError(f"assignment does not cover {expr.g}")
        return asg[expr.g]
    if isinstance(expr, Lin):
        out = CompletionElement(ctx)
        for k, e in expr.terms:
            out = out + evaluate_symbolic(e, asg).scale(k)
        return out
    a = evaluate_symbolic(expr.a, asg)
    b = evaluate_symbolic(expr.b, asg)
    if isinstance(expr, Br):
        return bracket(a, b)
    if isinstance(expr, Anti):
        return multiply(a, b) + multiply(b, a)
    if isinstance(expr, Prod):
        return multiply(a, b)
    raise TypeError(f"unknown expression node {expr!r}")


def evaluate_truncated(expr, images: dict) -> AlgebraElement:
    """Evaluate with expanded (finite) images."""
    if isinstance(expr, Gen):
        return images[expr.g]
    if isinstance(expr, Lin):
        out = None
        for k, e in expr.terms:
            v = evaluate_truncated(e, images).scale(k)
            out = v if out is None else out + v
        return out if out is not None else AlgebraElement.zero(next(iter(images.values())).ctx)
    a = evaluate_truncated(expr.a, images)
    b = evaluate_truncated(expr.b, images)
    if isinstance(expr, Br):
        return bracket_u(a, b)
    if isinstance(expr, Anti):
        return anticommutator(a, b)
    if isinstance(expr, Prod):
        return a * b
    raise TypeError(f"unknown expression node {expr!r}")


def expression_depth(expr) -> int:
    """Number of generator slots multiplied together (bounds the mode spread)."""
    if isinstance(expr, Gen):
        return 1
    if isinstance(expr, Lin):
        return max((expression_depth(e) for _, e in expr.terms), default=0)
    return expression_depth(expr.a) + expression_depth(expr.b)


@dataclass
class Verdict:
    relation: str
    anchor: str
    holds: bool
    mode: str
    counterexample: str = ""
    residual: object = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _specialize(x, c_value):
    if c_value is None:
        return x
    if isinstance(x, AlgebraElement):
        x = CompletionElement.of(x)
        return specialize_centrals(x, c_value, ONE).finite
    return specialize_centrals(x, c_value, ONE)


def guard_shift(rel: Relation, asg: Assignment) -> int:
    """Mode shift A used for the guard band of a truncated comparison."""
    gens = rel.generators()
    fam = max((asg[g].max_shift() for g in gens), default=0)
    fin = max((asg[g].max_finite_mode() for g in gens), default=0)
    depth = max(expression_depth(rel.lhs), expression_depth(rel.rhs))
    return fam + depth * max(fin, 1)


def evaluate_relation(rel: Relation, asg: Assignment, mode: str = "symbolic",
                      window: TruncationWindow | None = None) -> Verdict:
    """Check one relation under an assignment.

    ``mode`` is 'symbolic', 'truncated' or 'auto' (symbolic with fallback to
    truncated when a two-index family cannot be decided exactly).
    """
    missing = rel.generators() - set(asg)
    if missing:
        raise KeyError(f"assignment does not cover {sorted(map(str, missing))}")
    if mode in ("symbolic", "auto"):
        try:
            diff = evaluate_symbolic(rel.lhs, asg) - evaluate_symbolic(rel.rhs, asg)
            diff = _specialize(diff, asg.c_value)
            if diff.pairs:
                raise UnsupportedFamilyArity("two-index families left after canonicalization")
        except UnsupportedFamilyArity:
            if mode == "symbolic":
                raise
        else:
            if diff.is_zero():
                return Verdict(rel.label, rel.anchor, True, "symbolic")
            text = dump(diff).splitlines()
            return Verdict(rel.label, rel.anchor, False, "symbolic",
                           counterexample=text[1] if len(text) > 1 else "", residual=diff)
    if window is None:
        window = TruncationWindow.guarded(4, guard_shift(rel, asg))
    window.check_guard(guard_shift(rel, asg))
    images = {g: asg[g] for g in rel.generators()}
    expanded = {g: expand(x, window.S_max) for g, x in images.items()}
    diff = evaluate_truncated(rel.lhs, expanded) - evaluate_truncated(rel.rhs, expanded)
    diff = truncate_project(_specialize(diff, asg.c_value), window)
    if diff.is_zero():
        return Verdict(rel.label, rel.anchor, True, "truncated",
                       detail={"N": window.N, "S_max": window.S_max})
    mono, k = diff.items()[0]
    return Verdict(rel.label, rel.anchor, False, "truncated",
                   counterexample=f"{k} * {format_monomial(mono)}", residual=diff,
                   detail={"N": window.N, "S_max": window.S_max})
