"""Images of the evaluation map in the completed enveloping algebra."""

from __future__ import annotations

from dataclasses import dataclass

from .affine_gl import C, E
from .foundation import (ALPHA, EPS1, HALF, HBAR, ONE, RankData, Scalar, delta_le,
                         parity, scalar_specialize, sign, unit_parity)
from .pbw import AlgebraElement, normal_order
from .tails import S, CompletionElement, TailFamily, specialize_centrals

FORMAL = "formal"
SPECIALIZED = "specialized"


class DegenerateCentralCharge(ValueError):
    """hbar*c = (n-m)*eps1 vanishes, so c cannot be divided out."""


@dataclass(frozen=True)
class EvalParams:
    ctx: RankData
    alpha: Scalar = ALPHA
    central: str = FORMAL
    bindings: tuple = ()   # (name, value) pairs applied to final scalars

    def __post_init__(self):
        if self.central not in (FORMAL, SPECIALIZED):
            raise ValueError(f"unknown central policy {self.central!r}")

    @property
    def hbar_c(self) -> Scalar:
        """The value (n - m) eps1 of hbar*c."""
        return self._bind(EPS1 * (self.ctx.n - self.ctx.m))

    @property
    def c_value(self) -> Scalar:
        hc = self.hbar_c
        if hc.is_zero():
            raise DegenerateCentralCharge(
                "degenerate central charge: hbar*c = (n-m)*eps1 vanishes (need eps1 != 0)")
        return hc / self._bind(HBAR)

    def _bind(self, x: Scalar) -> Scalar:
        return scalar_specialize(x, dict(self.bindings)) if self.bindings else x

    def finish(self, x: CompletionElement) -> CompletionElement:
        """Apply the central policy and the numeric bindings to an image."""
        if self.bindings:
            x = x.map_coefficients(self._bind)
        if self.central == SPECIALIZED:
            x = specialize_centrals(x, self.c_value, ONE)
        return x


def _check(ctx, i):
    if not 0 <= i < ctx.size:
        raise IndexError(f"node {i} outside 0..{ctx.size - 1}")


def h_element(ctx: RankData, i: int, mode: int = 0, with_c: bool = True) -> AlgebraElement:
    """h_i (x) t^mode; the c-term of h_0 is included only at mode 0."""
    _check(ctx, i)
    N = ctx.size
    if i == 0:
        out = -AlgebraElement.gen(ctx, E(1, 1, mode)) - AlgebraElement.gen(ctx, E(N, N, mode))
        if with_c and mode == 0:
            out = out + AlgebraElement.gen(ctx, C)
        return out
    return (AlgebraElement.gen(ctx, E(i, i, mode), sign(ctx, i))
            - AlgebraElement.gen(ctx, E(i + 1, i + 1, mode), sign(ctx, i + 1)))


def x_element(ctx: RankData, i: int, pm: int) -> AlgebraElement:
    _check(ctx, i)
    N = ctx.size
    if i == 0:
        if pm > 0:
            return AlgebraElement.gen(ctx, E(N, 1, 1))
        return AlgebraElement.gen(ctx, E(1, N, -1), -1)
    if pm > 0:
        return AlgebraElement.gen(ctx, E(i, i + 1, 0))
    return AlgebraElement.gen(ctx, E(i + 1, i, 0), sign(ctx, i))


def ev_level0(ctx: RankData, i: int, kind: str) -> CompletionElement:
    """Image of x+_{i,0}, x-_{i,0} or h_{i,0} (kind 'x+', 'x-', 'h')."""
    if kind == "h":
        return CompletionElement.of(h_element(ctx, i))
    if kind in ("x+", "x-"):
        return CompletionElement.of(x_element(ctx, i, 1 if kind == "x+" else -1))
    raise ValueError(f"unknown generator kind {kind!r}")


def shift(ctx: RankData, i: int) -> int:
    """Integer multiplying eps1 in the linear coefficient of ev(h_{i,1})."""
    _check(ctx, i)
    if i == 0:
        return ctx.m - ctx.n
    return i - 2 * delta_le(ctx.m + 1, i) * (i - ctx.m)


def linear_coefficient(params: EvalParams, i: int) -> Scalar:
    return params.alpha - EPS1 * shift(params.ctx, i)


def _quad(coeff, r, k, lo, hi):
    """coeff * sum_s E_{r,k}(lo - s) E_{k,r}(hi + s)."""
    return TailFamily(coeff, ((r, k, (-1, 0, lo)), (k, r, (1, 0, hi))))


def h1_tail_blocks(ctx: RankData, i: int) -> dict:
    """The four tail blocks of ev(h_{i,1}) with the k-sums expanded.

    Keys are 'term3'..'term6' in the order they appear in the image (for
    i = 0 only 'term3' and 'term4' are present).
    """
    _check(ctx, i)
    N = ctx.size
    p = lambda k: sign(ctx, k)
    if i == 0:
        return {
            "term3": [_quad(-HBAR * p(k), N, k, 0, 0) for k in range(1, N + 1)],
            "term4": [_quad(-HBAR * p(k), 1, k, -1, 1) for k in range(1, N + 1)],
        }
    return {
        "term3": [_quad(HBAR * (p(i) * p(k)), i, k, 0, 0) for k in range(1, i + 1)],
        "term4": [_quad(HBAR * (p(i) * p(k)), i, k, -1, 1) for k in range(i + 1, N + 1)],
        "term5": [_quad(-HBAR * (p(i + 1) * p(k)), i + 1, k, 0, 0) for k in range(1, i + 1)],
        "term6": [_quad(-HBAR * (p(i + 1) * p(k)), i + 1, k, -1, 1) for k in range(i + 1, N + 1)],
    }


def h1_finite_part(params: EvalParams, i: int) -> AlgebraElement:
    ctx = params.ctx
    N = ctx.size
    lin = h_element(ctx, i).scale(linear_coefficient(params, i))
    if i == 0:
        quad = normal_order(ctx, (E(N, N), E(1, 1)), HBAR) - normal_order(ctx, (E(N, N), C), HBAR)
    else:
        quad = normal_order(ctx, (E(i, i), E(i + 1, i + 1)), -HBAR * (-1 if unit_parity(ctx, i, i + 1) else 1))
    return lin + quad


def ev_h1_raw(params: EvalParams, i: int) -> CompletionElement:
    """ev(h_{i,1}) before the central policy is applied."""
    ctx = params.ctx
    fams = [f for block in h1_tail_blocks(ctx, i).values() for f in block]
    return CompletionElement.from_parts(ctx, h1_finite_part(params, i), fams)


def ev_h1(i: int, params: EvalParams) -> CompletionElement:
    return params.finish(ev_h1_raw(params, i))


class ImageMismatch(AssertionError):
    """An image and its closed form disagree."""


def htilde_closed_form(params: EvalParams, i: int) -> CompletionElement:
    """Closed form of ev(h~_{i,1}) written with -(hbar/2)E^2 squares (and -hbar*c*E_NN at i=0)."""
    ctx = params.ctx
    N = ctx.size
    lin = h_element(ctx, i).scale(linear_coefficient(params, i))
    half = -HBAR * HALF
    if i == 0:
        fin = (lin + normal_order(ctx, (E(N, N), E(N, N)), half)
               + normal_order(ctx, (E(1, 1), E(1, 1)), half)
               - normal_order(ctx, (C, E(N, N)), HBAR))
    else:
        fin = (lin + normal_order(ctx, (E(i, i), E(i, i)), half)
               + normal_order(ctx, (E(i + 1, i + 1), E(i + 1, i + 1)), half))
    fams = [f for block in h1_tail_blocks(ctx, i).values() for f in block]
    return CompletionElement.from_parts(ctx, fin, fams)


def closed_form_defect(params: EvalParams, i: int) -> CompletionElement:
    """ev(h_{i,1}) - (hbar/2) h_i^2 minus the closed h~ form.

    Zero for i != 0; at i = 0 it is -hbar*c*h_0 + hbar*c^2/2.
    """
    return ev_htilde1_raw(params, i) - htilde_closed_form(params, i)


def ev_htilde1_raw(params: EvalParams, i: int, against_closed_form: bool = False) -> CompletionElement:
    ctx = params.ctx
    h = h_element(ctx, i)
    out = ev_h1_raw(params, i) - CompletionElement.of((h * h).scale(HBAR * HALF))
    if against_closed_form and out != htilde_closed_form(params, i):
        raise ImageMismatch(f"ev(h~_{i},1) disagrees with its closed form")
    return out


def ev_htilde1(i: int, params: EvalParams, against_closed_form: bool = False) -> CompletionElement:
    return params.finish(ev_htilde1_raw(params, i, against_closed_form))


def specialize_central(x: CompletionElement, params: EvalParams) -> CompletionElement:
    if params.central != SPECIALIZED:
        raise ValueError("specialize_central needs the 'specialized' central policy")
    return specialize_centrals(x, params.c_value, ONE)


def evaluation_assignment(params: EvalParams):
    """Images of all level-0 and level-1 generators.

    x^pm_{i,1} is produced by the mode recursion from h~_{i,1} (or h~_{i+1,1}
    at the odd nodes 0 and m).  Centrals stay formal in the images; the
    assignment records the value of c used when relations are checked
    (None under the formal policy).
    """
    from .yangian import Assignment, hgen, raise_x, xgen

    ctx = params.ctx
    formal = EvalParams(ctx, params.alpha, FORMAL, params.bindings)
    c_value = params.c_value if params.central == SPECIALIZED else None
    asg = Assignment(ctx, {}, c_value)
    for i in range(ctx.size):
        asg[xgen(1, i, 0)] = ev_level0(ctx, i, "x+")
        asg[xgen(-1, i, 0)] = ev_level0(ctx, i, "x-")
        asg[hgen(i, 0)] = ev_level0(ctx, i, "h")
        h1 = ev_h1_raw(formal, i)
        if params.bindings:
            h1 = h1.map_coefficients(formal._bind)
        asg[hgen(i, 1)] = h1
    for i in range(ctx.size):
        for pm in (1, -1):
            asg[xgen(pm, i, 1)] = raise_x(asg, pm, i, 0)
    return asg
