import pytest

from superyangian.affine_gl import C, E
from superyangian.evalmap import (FORMAL, SPECIALIZED, DegenerateCentralCharge, EvalParams,
                                  ImageMismatch, closed_form_defect, ev_h1, ev_htilde1, ev_level0,
                                  h_element, htilde_closed_form, linear_coefficient, shift,
                                  specialize_central)
from superyangian.foundation import ALPHA, EPS1, HALF, HBAR, ONE, RankData, cartan_a
from superyangian.pbw import AlgebraElement, degree, normal_order
from superyangian.tails import CompletionElement, bracket, canonicalize, expand

from conftest import DESK_RANKS

CTX = RankData(3, 2)
P = EvalParams(CTX)


def gen(i, j, s=0, k=ONE):
    return AlgebraElement.gen(CTX, E(i, j, s), k)


def test_level0_examples():
    assert ev_level0(CTX, 0, "x+").finite == gen(5, 1, 1)
    assert ev_level0(CTX, 0, "x-").finite == gen(1, 5, -1, -ONE)
    assert ev_level0(CTX, 1, "h").finite == gen(1, 1) - gen(2, 2)
    assert ev_level0(CTX, 3, "x-").finite == gen(4, 3)
    assert ev_level0(CTX, 0, "h").finite == -gen(1, 1) - gen(5, 5) + AlgebraElement.gen(CTX, C)
    with pytest.raises(IndexError):
        ev_level0(CTX, 5, "h")


@pytest.mark.parametrize("m,n", DESK_RANKS)
def test_level0_cartan_action(m, n):
    ctx = RankData(m, n)
    for i in range(ctx.size):
        h = ev_level0(ctx, i, "h")
        for j in range(ctx.size):
            for pm, kind in ((1, "x+"), (-1, "x-")):
                x = ev_level0(ctx, j, kind)
                assert bracket(h, x) == x.scale(pm * cartan_a(ctx, i, j))


def test_linear_coefficient():
    assert shift(CTX, 4) == 2
    assert linear_coefficient(P, 4) == ALPHA - 2 * EPS1
    assert shift(CTX, 0) == 1


@pytest.mark.parametrize("m,n", DESK_RANKS)
def test_h1_images_have_degree_zero_and_even_parity(m, n):
    ctx = RankData(m, n)
    p = EvalParams(ctx)
    for i in range(ctx.size):
        x = ev_h1(i, p)
        assert x.parity() == 0
        assert all(degree(mono) == 0 for mono, _ in expand(x, 3).items())


def test_h1_node0_family_block():
    from superyangian.evalmap import h1_tail_blocks
    from superyangian.foundation import sign
    fams = h1_tail_blocks(CTX, 0)["term3"]
    assert [(f.coeff, f.factors) for f in fams] == [
        (-HBAR * sign(CTX, k), ((5, k, (-1, 0, 0)), (k, 5, (1, 0, 0)))) for k in range(1, 6)]


@pytest.mark.parametrize("i", range(5))
def test_h1_canonical_form_matches_raw_sum(i):
    """The canonical image and the raw sum agree on a guarded window."""
    from superyangian.evalmap import h1_finite_part, h1_tail_blocks
    from superyangian.pbw import TruncationWindow, truncate_project
    from superyangian.tails import expand_raw
    fams = [f for block in h1_tail_blocks(CTX, i).values() for f in block]
    w = TruncationWindow.guarded(3, 1)
    raw = expand_raw(CTX, fams, h1_finite_part(P, i), w.S_max)
    assert truncate_project(expand(ev_h1(i, P), w.S_max) - raw, w).is_zero()
    zero_slice = h1_finite_part(P, i)
    for f in fams:
        zero_slice = zero_slice + normal_order(CTX, f.term_word(0), f.coeff)
    assert expand_raw(CTX, fams, h1_finite_part(P, i), 0) == zero_slice


def test_htilde_matches_closed_form_off_node0(small_ctx):
    p = EvalParams(small_ctx)
    for i in range(1, small_ctx.size):
        assert ev_htilde1(i, p, against_closed_form=True) == htilde_closed_form(p, i)


def test_htilde_closed_form_defect_node0(small_ctx):
    p = EvalParams(small_ctx)
    h0 = CompletionElement.of(h_element(small_ctx, 0))
    c = CompletionElement.of(AlgebraElement.gen(small_ctx, C))
    want = (c * h0).scale(-HBAR) + (c * c).scale(HBAR * HALF)
    assert closed_form_defect(p, 0) == want
    with pytest.raises(ImageMismatch):
        ev_htilde1(0, p, against_closed_form=True)


def test_htilde_definition():
    for i in range(CTX.size):
        h = h_element(CTX, i)
        assert ev_h1(i, P) - ev_htilde1(i, P) == CompletionElement.of((h * h).scale(HBAR * HALF))


def test_htilde_node1_quadratic_part():
    fin = ev_htilde1(1, P).finite
    assert dict(fin.items()).get((0, 0, (E(1, 1), E(1, 1)))) is not None


def test_specialize_central_examples():
    sp = EvalParams(CTX, central=SPECIALIZED)
    x = CompletionElement.of(AlgebraElement.monomial(CTX, (E(5, 5),), HBAR, c=1))
    assert specialize_central(x, sp).finite == gen(5, 5, 0, -EPS1)
    z = CompletionElement.of(AlgebraElement.monomial(CTX, (E(1, 2, 3),), z=1))
    assert specialize_central(z, sp).finite == gen(1, 2, 3)
    zero = EvalParams(CTX, central=SPECIALIZED, bindings=(("eps1", 0),))
    with pytest.raises(DegenerateCentralCharge):
        zero.c_value
    with pytest.raises(ValueError):
        specialize_central(x, P)
