import random

import pytest

from superyangian.affine_gl import E
from superyangian.foundation import EPS1, EPS2, HBAR, ONE, RankData, Scalar
from superyangian.pbw import AlgebraElement, TruncationWindow, normal_order, truncate_project
from superyangian.tails import (S, CompletionElement, TailFamily, bracket, canonicalize, dump,
                                expand, family, load, resolve_deltas, specialize_centrals)

CTX = RankData(3, 2)


def fin(i, j, s=0, k=ONE, c=0):
    return AlgebraElement.monomial(CTX, (E(i, j, s),), k, c=c)


def test_resolve_deltas_examples():
    # sum_s delta_{s+a} s c E_{1,1}(-s)
    f = lambda a: family(1, (1, 1, (-1, 0, 0)), weights=[S], deltas=[(1, 0, a)], c=1)
    assert resolve_deltas(CTX, f(1)).is_zero()
    assert resolve_deltas(CTX, f(-2)) == CompletionElement.of(fin(1, 1, -2, Scalar(2), c=1))
    g = family(1, (1, 1, (1, 0, 0)), weights=[S], deltas=[(-1, 0, 3)], c=1)
    assert resolve_deltas(CTX, g) == CompletionElement.of(fin(1, 1, 3, Scalar(3), c=1))


def test_family_commutes_with_diagonal():
    x = CompletionElement.from_parts(CTX, None, [family(1, (1, 2, (-1, 0, 0)), (2, 1, S))])
    assert bracket(x, CompletionElement.of(fin(1, 1) + fin(2, 2))).is_zero()


def test_expand_counts_terms():
    x = CompletionElement.from_parts(CTX, None, [family(1, (1, 2, (-1, 0, 0)), (2, 1, S))])
    assert len(expand(x, 2).items()) == 3


def test_boundary_terms_move_to_finite():
    # E_{1,2}(1-s) E_{2,1}(s-1) is out of PBW order only at s = 0
    x = CompletionElement.from_parts(CTX, None, [family(1, (1, 2, (-1, 0, 1)), (2, 1, (1, 0, -1)))])
    assert x == CompletionElement.from_parts(
        CTX, normal_order(CTX, (E(1, 2, 1), E(2, 1, -1))),
        [family(1, (1, 2, (-1, 0, 0)), (2, 1, S))])


def test_divergent_ordering_rejected():
    from superyangian.tails import NonConvergentFamily
    with pytest.raises(NonConvergentFamily):
        CompletionElement.from_parts(CTX, None, [family(1, (2, 1, S), (1, 2, (-1, 0, 0)))])


def test_shifted_sum_equals_split_sum():
    f = family(HBAR, (1, 3, (-1, 0, -1)), (3, 1, (1, 0, 1)))
    g = family(HBAR, (1, 3, (-1, 0, 0)), (3, 1, S))
    lhs = CompletionElement.from_parts(CTX, None, [g])
    rhs = CompletionElement.from_parts(CTX, normal_order(CTX, (E(1, 3), E(3, 1)), HBAR), [f])
    assert lhs == rhs


def test_two_index_family_kept_raw():
    a = CompletionElement.from_parts(CTX, None, [family(1, (1, 2, (-1, 0, 0)), (2, 1, S))])
    b = CompletionElement.from_parts(CTX, None, [family(1, (2, 3, (-1, 0, 0)), (3, 2, S))])
    assert bracket(a, b).pairs


def test_dump_load_roundtrip():
    x = CompletionElement.from_parts(
        CTX, fin(1, 2, 1, EPS1 / EPS2),
        [family(HBAR, (1, 4, (-1, 0, -1)), (4, 1, (1, 0, 1))),
         family(2, (5, 5, (-1, 0, 0)), (5, 5, S), c=1)])
    text = dump(x)
    assert text.startswith("# completion-element v1\n")
    assert load(CTX, text) == x
    assert dump(load(CTX, text)) == text


def test_specialize_centrals():
    x = CompletionElement.of(AlgebraElement.monomial(CTX, (E(5, 5),), HBAR, c=1)
                             + AlgebraElement.monomial(CTX, (E(1, 2, 3),), z=1))
    kappa = -EPS1 / HBAR
    y = specialize_centrals(x, kappa, ONE)
    assert y.finite == fin(5, 5, 0, -EPS1) + fin(1, 2, 3)


# --- oracle equivalence -----------------------------------------------------

def _random_family(rng, ctx):
    N = ctx.size
    r, k = rng.randint(1, N), rng.randint(1, N)
    b1, b2 = rng.randint(-2, 1), rng.randint(-1, 2)
    coeff = Scalar(rng.choice([-2, -1, 1, 2])) * rng.choice([ONE, EPS1, HBAR, EPS1 - EPS2])
    return TailFamily(coeff, ((r, k, (-1, 0, b1)), (k, r, (1, 0, b2))))


def _rewrite(rng, ctx, fam):
    """The same formal sum with its first few terms written out."""
    (r, k, (_, _, b1)), (_, _, (_, _, b2)) = fam.factors
    lead = rng.randint(1, 3)
    head = AlgebraElement.zero(ctx)
    for s in range(lead):
        head = head + normal_order(ctx, fam.term_word(s), fam.coeff)
    tail = TailFamily(fam.coeff, ((r, k, (-1, 0, b1 - lead)), (k, r, (1, 0, b2 + lead))))
    return head, [tail]


def _random_pair(rng, ctx):
    fams = [_random_family(rng, ctx) for _ in range(rng.randint(1, 3))]
    finite = AlgebraElement.zero(ctx)
    for _ in range(rng.randint(0, 2)):
        i, j = rng.randint(1, ctx.size), rng.randint(1, ctx.size)
        finite = finite + AlgebraElement.gen(ctx, E(i, j, rng.randint(-2, 2)), rng.randint(-2, 2))
    x = CompletionElement.from_parts(ctx, finite, fams)
    yfin, yfams = finite.copy(), []
    for f in fams:
        h, t = _rewrite(rng, ctx, f)
        yfin = yfin + h
        yfams += t
    if rng.random() < 0.5:
        i, j = rng.randint(1, ctx.size), rng.randint(1, ctx.size)
        if rng.random() < 0.5:
            yfin = yfin + AlgebraElement.gen(ctx, E(i, j, rng.randint(-2, 2)))
        else:
            yfams.append(_random_family(rng, ctx))
    return x, CompletionElement.from_parts(ctx, yfin, yfams)


def oracle_agreement(n_cases=100, seed=11, N=3):
    rng = random.Random(seed)
    agree = equal = 0
    for _ in range(n_cases):
        ctx = rng.choice([RankData(3, 2), RankData(2, 3)])
        x, y = _random_pair(rng, ctx)
        symbolic = x == y
        shift = max(x.max_shift(), y.max_shift(), x.max_finite_mode(), y.max_finite_mode())
        w = TruncationWindow.guarded(N, shift)
        truncated = truncate_project(expand(x, w.S_max) - expand(y, w.S_max), w).is_zero()
        agree += symbolic == truncated
        equal += symbolic
    return agree, equal, n_cases


def test_oracle_equivalence_random():
    agree, equal, n = oracle_agreement()
    assert agree == n
    assert 10 < equal < n - 10     # both outcomes exercised


def test_canonicalize_idempotent():
    rng = random.Random(3)
    for _ in range(20):
        x, _ = _random_pair(rng, CTX)
        assert canonicalize(x) == x
        assert canonicalize(canonicalize(x)) == canonicalize(x)
