"""Density of the evaluation image: identities, witnesses and reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .affine_gl import C, E
from .evalmap import (SPECIALIZED, EvalParams, DegenerateCentralCharge, ev_h1,
                      ev_htilde1, h1_finite_part, h1_tail_blocks, h_element, htilde_closed_form,
                      linear_coefficient)
from .foundation import HALF, HBAR, ONE, ZERO, RankData, Scalar, parity, sign
from .pbw import AlgebraElement, TruncationWindow, normal_order, sl_membership, truncate_project
from .tails import (CompletionElement, TailFamily, bracket, canonicalize, dump, expand,
                    specialize_centrals)


def _fam(coeff, r, k, lo, hi, weights=(), deltas=(), c=0):
    """coeff * sum_s E_{r,k}(lo) E_{k,r}(hi) with affine modes lo, hi in s."""
    return TailFamily(Scalar.coerce(coeff), ((r, k, lo), (k, r, hi)), 1,
                      tuple(weights), tuple(deltas), c, 0)


def _diag_fam(coeff, r, mode, weights, deltas):
    """coeff * sum_s w(s) delta(...) c E_{r,r}(mode)."""
    return TailFamily(Scalar.coerce(coeff), ((r, r, mode),), 1, tuple(weights), tuple(deltas), 1, 0)


def _completion(ctx, families, finite=None):
    return CompletionElement.from_parts(ctx, finite or AlgebraElement.zero(ctx), families)


def _central_split(x: CompletionElement):
    """(terms carrying a power of c, the rest)."""
    ctx = x.ctx
    cen, rest = AlgebraElement.zero(ctx), AlgebraElement.zero(ctx)
    for mono, k in x.finite.items():
        (cen if mono[0] or mono[1] else rest).add_term(mono, k)
    central = CompletionElement.of(cen)
    other = x - central
    for fam in other.families():
        if fam.c_exp:
            raise ValueError("central tail family left after canonicalization")
    return central, other


def completion_sl_membership(x: CompletionElement) -> bool:
    """Certify x lies in the completion of U(sl-hat).

    The finite part is rewritten in the adapted basis; a tail family is
    accepted when every factor is an off-diagonal unit.
    """
    if x.pairs:
        return False
    ok, _, _ = sl_membership(x.finite)
    if not ok:
        return False
    for fam in x.families():
        if fam.c_exp or fam.z_exp or any(r == col for r, col, _ in fam.factors):
            return False
    return True


# ---------------------------------------------------------------------------
# sum of h~_{i,1}


def linear_h_part(params: EvalParams) -> AlgebraElement:
    ctx = params.ctx
    out = AlgebraElement.zero(ctx)
    for i in range(ctx.size):
        out = out + h_element(ctx, i).scale(linear_coefficient(params, i))
    return out


def _diag_square_families(ctx, coeff, lo, hi):
    return [_fam(coeff, r, r, lo, hi) for r in range(1, ctx.size + 1)]


@dataclass
class IdentityCheck:
    name: str
    holds: bool
    lhs: CompletionElement
    rhs: CompletionElement
    residual: CompletionElement
    anchor: str = ""

    def first_divergence(self) -> str:
        lines = dump(self.residual).splitlines()
        return lines[1] if len(lines) > 1 else ""


def _check(name, lhs, rhs, anchor=""):
    lhs, rhs = canonicalize(lhs), canonicalize(rhs)
    res = lhs - rhs
    return IdentityCheck(name, res.is_zero(), lhs, rhs, res, anchor)


@dataclass
class HtildeSumResult:
    holds: bool                      # sum of ev(h~) equals lin - hbar*c*E_NN
    checks: list = field(default_factory=list)

    def check(self, name) -> IdentityCheck:
        return next(c for c in self.checks if c.name == name)


def _grouped_tails(ctx):
    """Tail families of all ev(h_{i,1}), split into the two telescoping groups.

    Group 'zero' collects patterns E(-s)E(s) (term3, term5 and the first
    node-0 block); group 'one' collects E(-s-1)E(s+1).
    """
    zero, one = [], []
    for i in range(ctx.size):
        for name, fams in h1_tail_blocks(ctx, i).items():
            (zero if name in ("term3", "term5") else one).extend(fams)
    return zero, one


def htilde_sum_identity(params: EvalParams) -> HtildeSumResult:
    """Sum over all nodes of ev(h~_{i,1}) against lin - hbar*c*E_{N,N}.

    Checks, in order: the two telescoping groups of tail families; the
    merged tails collapsing to hbar * sum E_{r,r}(0)^2; the sum of the
    closed h~ forms against that target; the sum of ev(h~)
    (by definition) against the same target; and against the right
    side hbar*c*E_{1,1} - hbar*c^2/2 that the definition actually yields.
    """
    ctx = params.ctx
    N = ctx.size
    checks = []
    zero, one = _grouped_tails(ctx)
    checks.append(_check("group-zero-modes", _completion(ctx, zero),
                         _completion(ctx, _diag_square_families(ctx, HBAR, (-1, 0, 0), (1, 0, 0))),
                         "tails of pattern E(-s)E(s) telescope"))
    checks.append(_check("group-shifted-modes", _completion(ctx, one),
                         _completion(ctx, _diag_square_families(ctx, -HBAR, (-1, 0, -1), (1, 0, 1))),
                         "tails of pattern E(-s-1)E(s+1) telescope"))
    squares = AlgebraElement.zero(ctx)
    for r in range(1, N + 1):
        squares = squares + normal_order(ctx, (E(r, r), E(r, r)), HBAR)
    checks.append(_check("tails-merge", _completion(ctx, zero + one), CompletionElement.of(squares),
                         "all tails collapse to hbar * sum E_rr^2"))

    lin = linear_h_part(params)
    target = CompletionElement.of(lin - normal_order(ctx, (C, E(N, N)), HBAR))
    closed = CompletionElement(ctx)
    defined = CompletionElement(ctx)
    for i in range(N):
        closed = closed + htilde_closed_form(params, i)
        defined = defined + ev_htilde1(i, EvalParams(ctx, params.alpha, "formal", params.bindings))
    if params.bindings:
        closed = closed.map_coefficients(params._bind)
        target = target.map_coefficients(params._bind)
    checks.append(_check("closed-form-route", closed, target, "sum of the closed h~ forms"))
    main = _check("definition-route", defined, target, "sum of h~ by definition, target lin - hbar*c*E_NN")
    checks.append(main)
    corrected = CompletionElement.of(lin + normal_order(ctx, (C, E(1, 1)), HBAR)
                                     - normal_order(ctx, (C, C), HBAR * HALF))
    if params.bindings:
        corrected = corrected.map_coefficients(params._bind)
    checks.append(_check("definition-route-corrected", defined, corrected,
                         "sum of h~ by definition, corrected right side"))
    return HtildeSumResult(main.holds, checks)


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class Witness:
    """target = sum(coeff * element) - residual, residual in the sl completion."""
    target: AlgebraElement
    rule: str
    expression: list             # (Scalar, label, CompletionElement)
    residual: CompletionElement
    verified: bool = False

    def value(self) -> CompletionElement:
        ctx = self.target.ctx
        out = CompletionElement(ctx)
        for k, _, x in self.expression:
            out = out + x.scale(k)
        return out

    def defect(self) -> CompletionElement:
        return canonicalize(self.value() - CompletionElement.of(self.target) - self.residual)


def _specialized(params: EvalParams) -> EvalParams:
    if params.central == SPECIALIZED:
        return params
    return EvalParams(params.ctx, params.alpha, SPECIALIZED, params.bindings)


def last_diagonal_witness(params: EvalParams) -> Witness:
    """E_{m+n,m+n}(0) from the sum of ev(h~_{i,1}) and level-0 images."""
    sp = _specialized(params)
    ctx = sp.ctx
    N = ctx.size
    hc = sp.hbar_c
    kappa = sp.c_value          # raises on a degenerate central charge
    total = CompletionElement(ctx)
    for i in range(N):
        total = total + ev_htilde1(i, sp)
    lin = CompletionElement.of(sp.finish(CompletionElement.of(linear_h_part(sp))).finite)
    h0 = sp.finish(CompletionElement.of(h_element(ctx, 0)))
    one = CompletionElement.of(AlgebraElement.one(ctx))
    # total - lin = hbar c E_{1,1} - hbar c^2/2, and E_{N,N} = c - h_0 - E_{1,1}
    expr = [(-ONE / hc, "sum_i ev(h~_{i,1})", total),
            (ONE / hc, "linear h-part", lin),
            (-ONE, "ev(h_{0,0})", h0),
            (kappa * HALF, "1", one)]
    w = Witness(AlgebraElement.gen(ctx, E(N, N)), "c1", expr, CompletionElement(ctx))
    w.verified = w.defect().is_zero()
    return w


def h_loop(ctx: RankData, i: int, a: int) -> AlgebraElement:
    """((-1)^{p(i)} E_{i,i} - (-1)^{p(i+1)} E_{i+1,i+1}) t^a, no central shift."""
    return (AlgebraElement.gen(ctx, E(i, i, a), sign(ctx, i))
            - AlgebraElement.gen(ctx, E(i + 1, i + 1, a), sign(ctx, i + 1)))


def _check_node(ctx, i):
    if not 1 <= i <= ctx.size - 1:
        raise ValueError(f"node {i} must lie in 1..{ctx.size - 1}")


def central_formula(ctx: RankData, i: int, a: int, with_parity_sign: bool = False) -> CompletionElement:
    """Delta-resolved central terms of the commutator with h_i t^a.

    ``with_parity_sign`` puts the (-1)^{p(i)} prefactor on the first term.
    """
    first = HBAR * (sign(ctx, i) if with_parity_sign else 1)
    fams = [
        _diag_fam(first, i, (-1, 0, 0), [(1, 0, 0)], [(1, 0, a)]),
        _diag_fam(-HBAR, i, (1, 0, 0), [(1, 0, 0)], [(-1, 0, a)]),
        _diag_fam(HBAR, i + 1, (-1, 0, -1), [(1, 0, 1)], [(1, 0, 1 + a)]),
        _diag_fam(-HBAR, i + 1, (1, 0, 1), [(1, 0, 1)], [(-1, 0, a - 1)]),
    ]
    return _completion(ctx, fams)


@dataclass
class Decomposition:
    total: CompletionElement
    central_part: CompletionElement
    sl_part: CompletionElement
    sl_member: bool
    matches_statement: bool
    matches_signed: bool


def h1_diag_commutator(i: int, a: int, params: EvalParams) -> Decomposition:
    ctx = params.ctx
    _check_node(ctx, i)
    total = canonicalize(bracket(ev_h1(i, params), CompletionElement.of(h_loop(ctx, i, a))))
    central, rest = _central_split(total)
    return Decomposition(total, central, rest, completion_sl_membership(rest),
                         central == central_formula(ctx, i, a),
                         central == central_formula(ctx, i, a, True))


def decomposition_terms(i: int, a: int, params: EvalParams) -> dict:
    """Bracket of each of the six pieces of ev(h_{i,1}) with h_i t^a."""
    ctx = params.ctx
    _check_node(ctx, i)
    y = CompletionElement.of(h_loop(ctx, i, a))
    fin = h1_finite_part(params, i)
    lin = h_element(ctx, i).scale(linear_coefficient(params, i))
    out = {"term1": bracket(CompletionElement.of(lin), y),
           "term2": bracket(CompletionElement.of(fin - lin), y)}
    for name, fams in h1_tail_blocks(ctx, i).items():
        out[name] = canonicalize(bracket(_completion(ctx, fams), y))
    return {k: params.finish(v) for k, v in out.items()}


def tail_block_closed_form(ctx: RankData, i: int, a: int, which: str,
                   parity_sign: bool = True) -> CompletionElement:
    """The closed forms stated for the bracket of one tail block with h_i t^a.

    For 'term3' the first central term carries the (-1)^{p(i)} prefactor;
    ``parity_sign=False`` drops it.
    """
    _check_node(ctx, i)
    N = ctx.size
    p = lambda k: sign(ctx, k)
    if which == "term3":
        fams = []
        for k in range(1, i):
            fams.append(_fam(HBAR * p(k), i, k, (-1, 0, 0), (1, 0, a)))
            fams.append(_fam(-HBAR * p(k), i, k, (-1, 0, a), (1, 0, 0)))
        fams.append(_diag_fam(HBAR * (p(i) if parity_sign else 1), i, (-1, 0, 0), [(1, 0, 0)], [(1, 0, a)]))
        fams.append(_diag_fam(-HBAR, i, (1, 0, 0), [(1, 0, 0)], [(-1, 0, a)]))
    elif which == "term4":
        fams = [_fam(HBAR * p(k), i, k, (-1, 0, -1), (1, 0, 1 + a)) for k in range(i + 1, N + 1)]
        fams.append(_fam(HBAR * p(i), i, i + 1, (-1, 0, -1), (1, 0, 1 + a)))
        fams.append(_fam(-HBAR * p(i), i, i + 1, (-1, 0, a - 1), (1, 0, 1)))
        fams += [_fam(-HBAR * p(k), i, k, (-1, 0, a - 1), (1, 0, 1)) for k in range(i + 1, N + 1)]
    elif which == "term5":
        fams = [_fam(HBAR * p(k), i + 1, k, (-1, 0, 0), (1, 0, a)) for k in range(1, i + 1)]
        fams.append(_fam(HBAR * p(i + 1), i + 1, i, (-1, 0, 0), (1, 0, a)))
        fams.append(_fam(-HBAR * p(i + 1), i + 1, i, (-1, 0, a), (1, 0, 0)))
        fams += [_fam(-HBAR * p(k), i + 1, k, (-1, 0, a), (1, 0, 0)) for k in range(1, i + 1)]
    elif which == "term6":
        fams = []
        for k in range(i + 2, N + 1):
            fams.append(_fam(HBAR * p(k), i + 1, k, (-1, 0, -1), (1, 0, 1 + a)))
            fams.append(_fam(-HBAR * p(k), i + 1, k, (-1, 0, a - 1), (1, 0, 1)))
        fams.append(_diag_fam(HBAR, i + 1, (-1, 0, -1), [(1, 0, 1)], [(1, 0, 1 + a)]))
        fams.append(_diag_fam(-HBAR, i + 1, (1, 0, 1), [(1, 0, 1)], [(-1, 0, a - 1)]))
    else:
        raise ValueError(f"unknown term selector {which!r}")
    return canonicalize(_completion(ctx, fams))


TAIL_BLOCK_LABELS = {"term3": "row i, k <= i", "term4": "row i, k > i",
                     "term5": "row i+1, k <= i", "term6": "row i+1, k > i"}


@dataclass
class TailBlockResult:
    which: str
    computed: CompletionElement
    closed_form: CompletionElement
    holds: bool
    central_part: CompletionElement
    sl_member: bool
    holds_unsigned: bool

    @property
    def anchor(self):
        return TAIL_BLOCK_LABELS[self.which]


def tail_block_bracket(i: int, a: int, which: str, params: EvalParams) -> TailBlockResult:
    ctx = params.ctx
    _check_node(ctx, i)
    if which not in TAIL_BLOCK_LABELS:
        raise ValueError(f"unknown term selector {which!r}")
    fams = h1_tail_blocks(ctx, i)[which]
    computed = canonicalize(bracket(_completion(ctx, fams), CompletionElement.of(h_loop(ctx, i, a))))
    shown = tail_block_closed_form(ctx, i, a, which)
    central, rest = _central_split(computed)
    unsigned = shown if which != "term3" else tail_block_closed_form(ctx, i, a, which, False)
    return TailBlockResult(which, computed, shown, computed == shown, central,
                        completion_sl_membership(rest), computed == unsigned)


# ---------------------------------------------------------------------------
# density


def same_parity_node(ctx: RankData) -> int:
    for i in range(1, ctx.size):
        if parity(ctx, i) == parity(ctx, i + 1):
            return i
    raise ValueError("no adjacent nodes of equal parity")


def _diag_in_h_basis(ctx: RankData, coeffs: dict) -> dict:
    """Write sum_r coeffs[r] E_{r,r} (zero supertrace) as sum_k mu_k h_k."""
    mu, carry = {}, Fraction(0)
    for k in range(1, ctx.size):
        # coefficient of E_{k,k} must be sign(k)*mu_k - sign(k)*mu_{k-1}
        mu[k] = Fraction(coeffs.get(k, 0)) * sign(ctx, k) + carry
        carry = mu[k]
    if Fraction(coeffs.get(ctx.size, 0)) != -sign(ctx, ctx.size) * carry:
        raise ValueError("diagonal element has nonzero supertrace")
    return {k: v for k, v in mu.items() if v}


def diag_witness(j: int, a: int, params: EvalParams, node: int | None = None) -> Witness:
    """E_{j,j}(a) for a != 0 from the commutator at a node of equal parities."""
    sp = _specialized(params)
    ctx = sp.ctx
    if a == 0:
        raise ValueError("use mode_zero_witness for a = 0")
    i = same_parity_node(ctx) if node is None else node
    dec = h1_diag_commutator(i, a, EvalParams(ctx, sp.alpha, "formal", sp.bindings))
    cen = dec.central_part
    ratio = cen.finite.terms.get((1, 0, (E(i, i, a),)))
    pair = AlgebraElement.monomial(ctx, (E(i, i, a),), c=1) + AlgebraElement.monomial(ctx, (E(i + 1, i + 1, a),), c=1)
    if ratio is None or cen != CompletionElement.of(pair.scale(ratio)):
        raise ValueError(f"central part at node {i}, mode {a} is not proportional to the pair sum")
    kappa = sp.c_value
    scale = ONE / (ratio * kappa)
    lam = Fraction(sign(ctx, j), 2 * sign(ctx, i))
    rest = {j: Fraction(1)}
    rest[i] = rest.get(i, 0) - lam
    rest[i + 1] = rest.get(i + 1, 0) - lam
    mu = _diag_in_h_basis(ctx, rest)
    comm = sp.finish(dec.total)
    expr = [(scale * Scalar(lam), f"[ev(h_{{{i},1}}), h_{i} t^{a}]", comm)]
    for k, v in sorted(mu.items()):
        expr.append((Scalar(v), f"h_{k} t^{a}", CompletionElement.of(h_loop(ctx, k, a))))
    residual = sp.finish(dec.sl_part).scale(scale * Scalar(lam))
    w = Witness(AlgebraElement.gen(ctx, E(j, j, a)), "c2+sl", expr, residual)
    w.verified = w.defect().is_zero() and completion_sl_membership(residual)
    return w


def mode_zero_witness(j: int, params: EvalParams) -> Witness:
    """E_{j,j}(0) from the E_{m+n,m+n} witness and level-0 h images."""
    sp = _specialized(params)
    ctx = sp.ctx
    N = ctx.size
    base = last_diagonal_witness(sp)
    if j == N:
        return base
    lam = Fraction(sign(ctx, j), sign(ctx, N))
    rest = {j: Fraction(1), N: -lam}
    mu = _diag_in_h_basis(ctx, rest)
    expr = [(k * Scalar(lam), label, x) for k, label, x in base.expression]
    for k, v in sorted(mu.items()):
        expr.append((Scalar(v), f"ev(h_{{{k},0}})", CompletionElement.of(h_loop(ctx, k, 0))))
    w = Witness(AlgebraElement.gen(ctx, E(j, j)), "c1+sl", expr, CompletionElement(ctx))
    w.verified = w.defect().is_zero()
    return w


def truncated_check(w: Witness, N: int, extra: int = 0) -> bool:
    """Guarded-truncation re-verification of a witness."""
    x = w.value() - w.residual
    shift = max(x.max_shift(), x.max_finite_mode(), 1)
    window = TruncationWindow.guarded(N, shift, extra)
    got = expand(x, window.S_max) - w.target
    return truncate_project(got, window).is_zero()


@dataclass
class DensityEntry:
    target: str
    rule: str
    verified: bool
    witness: Witness


@dataclass
class DensityReport:
    m: int
    n: int
    window: int
    entries: list

    @property
    def all_verified(self) -> bool:
        return all(e.verified for e in self.entries)


def density_report(params: EvalParams, N: int) -> DensityReport:
    ctx = params.ctx
    if N > 4:
        raise ValueError("window above 4 is outside the supported range")
    _specialized(params).c_value     # fail early on a degenerate central charge
    entries = []
    for j in range(1, ctx.size + 1):
        for a in range(-N, N + 1):
            w = mode_zero_witness(j, params) if a == 0 else diag_witness(j, a, params)
            ok = w.verified and truncated_check(w, N) and truncated_check(w, N, extra=2)
            entries.append(DensityEntry(f"E{j},{j}({a})", w.rule, ok, w))
    w = last_diagonal_witness(params)
    ok = w.verified and truncated_check(w, N) and truncated_check(w, N, extra=2)
    entries.append(DensityEntry(f"E{ctx.size},{ctx.size}(0)", "c1", ok, w))
    return DensityReport(ctx.m, ctx.n, N, entries)
