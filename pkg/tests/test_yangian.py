import random
from collections import Counter

import pytest

from superyangian.evalmap import SPECIALIZED, EvalParams, evaluation_assignment
from superyangian.foundation import (EPS1, EPS2, HALF, HBAR, ONE, RankData, cartan_a,
                                     cartan_m)
from superyangian.pbw import TruncationWindow, bracket_u, truncate_project
from superyangian.tails import CompletionElement, specialize_centrals
from superyangian.yangian import (Br, Gen, evaluate_relation, guard_shift, hgen,
                                  higher_modes, minimal_relations, xgen)

from faults import first_failure, perturb

CTX = RankData(3, 2)


@pytest.fixture(scope="module")
def asg():
    return evaluation_assignment(EvalParams(CTX, central=SPECIALIZED))


def test_relation_counts():
    rels = minimal_relations(CTX)
    assert len(rels) == 368
    assert Counter(r.id for r in rels) == {
        "h-commute": 45, "x-pair-0": 25, "x-pair-1": 50, "h-weight": 100, "htilde-weight": 50,
        "x-shift": 50, "serre": 40, "odd-square": 4, "odd-quartic": 4}


def test_odd_node_relations_only_at_0_and_m():
    rels = minimal_relations(CTX)
    assert {dict(r.params)["i"] for r in rels if r.id == "odd-square"} == {0, 3}
    assert {dict(r.params)["i"] for r in rels if r.id == "odd-quartic"} == {0, 3}


def test_serre_power():
    rel = next(r for r in minimal_relations(CTX)
               if r.id == "serre" and dict(r.params) == {"i": 1, "j": 2, "pm": 1})
    depth, e = 0, rel.lhs
    while isinstance(e, Br):
        depth, e = depth + 1, e.b
    assert depth == 1 + abs(cartan_a(CTX, 1, 2)) == 2


def test_generator_parity():
    assert xgen(1, 0, 0).parity(CTX) == 1
    assert xgen(-1, 3, 1).parity(CTX) == 1
    assert xgen(1, 1, 0).parity(CTX) == 0
    assert hgen(0, 1).parity(CTX) == 0


def test_x_pair_at_node0(asg):
    rel = next(r for r in minimal_relations(CTX)
               if r.id == "x-pair-0" and dict(r.params) == {"i": 0, "j": 0})
    assert evaluate_relation(rel, asg, "symbolic")


@pytest.mark.parametrize("m,n", [(3, 2), (2, 3)])
def test_all_finite_relations_symbolic(m, n):
    ctx = RankData(m, n)
    a = evaluation_assignment(EvalParams(ctx, central=SPECIALIZED))
    bad = [r.label for r in minimal_relations(ctx)
           if r.id != "h-commute" and not evaluate_relation(r, a, "symbolic")]
    assert bad == []


def test_formal_centrals_break_node0_relations():
    a = evaluation_assignment(EvalParams(CTX))
    bad = {r.id for r in minimal_relations(CTX)
           if r.id != "h-commute" and not evaluate_relation(r, a, "symbolic")}
    assert bad == {"x-pair-1", "htilde-weight", "x-shift"}


def test_h_commute_level_one_needs_truncation(asg):
    from superyangian.tails import UnsupportedFamilyArity
    rel = next(r for r in minimal_relations(CTX)
               if r.id == "h-commute" and dict(r.params) == {"i": 1, "r": 1, "j": 2, "s": 1})
    with pytest.raises(UnsupportedFamilyArity):
        evaluate_relation(rel, asg, "symbolic")
    v = evaluate_relation(rel, asg, "truncated", TruncationWindow.guarded(4, guard_shift(rel, asg)))
    assert v.holds and v.mode == "truncated"


def test_guard_band_enforced(asg):
    rel = next(r for r in minimal_relations(CTX) if r.id == "h-commute")
    with pytest.raises(ValueError):
        evaluate_relation(rel, asg, "truncated", TruncationWindow(4, 4))


def test_alpha_negative_control(asg):
    bad = asg.copy()
    g = hgen(1, 1)
    bad[g] = asg[g].map_coefficients(lambda k: k.subs({"alpha": 0}))
    fails = [evaluate_relation(r, bad) for r in minimal_relations(CTX) if r.id == "htilde-weight"]
    fails = [v for v in fails if not v.holds]
    assert fails and all("alpha" in v.counterexample for v in fails)


def test_missing_generator(asg):
    part = asg.copy()
    del part[hgen(1, 1)]
    rel = next(r for r in minimal_relations(CTX)
               if r.id == "x-pair-1" and dict(r.params)["i"] == 1 and dict(r.params)["j"] == 1)
    with pytest.raises(KeyError):
        evaluate_relation(rel, part)


def test_fault_injection_sample(asg):
    rng = random.Random(99)
    for _ in range(5):
        bad, g, _ = perturb(asg, rng)
        assert first_failure(bad, g) is not None


def test_higher_modes_levels_kept(asg):
    out = higher_modes(asg, 1)
    assert all(out[g] == asg[g] for g in asg)
    with pytest.raises(ValueError):
        higher_modes(asg, 4)


def test_higher_modes_two_routes(asg):
    """h_{1,2} = [x+_{1,2}, x-_{1,0}] = [x+_{1,1}, x-_{1,1}], and x+_{1,2} via node 2."""
    kappa = EvalParams(CTX, central=SPECIALIZED).c_value
    H = higher_modes(asg, 2, "truncated", S_max=9)
    sp = lambda x: specialize_centrals(CompletionElement.of(x), kappa).finite
    f = lambda g: H[g].finite
    d1 = sp(f(hgen(1, 2)) - bracket_u(f(xgen(1, 1, 1)), f(xgen(-1, 1, 1))))
    assert truncate_project(d1, 3).is_zero()
    ht = f(hgen(2, 1)) - (f(hgen(2, 0)) * f(hgen(2, 0))).scale(HBAR * HALF)
    x12 = (bracket_u(ht, f(xgen(1, 1, 1))).scale(ONE / cartan_a(CTX, 2, 1))
           + f(xgen(1, 1, 1)).scale(cartan_m(CTX, 2, 1) * (EPS1 - EPS2) * HALF))
    assert truncate_project(sp(x12 - f(xgen(1, 1, 2))), 3).is_zero()
