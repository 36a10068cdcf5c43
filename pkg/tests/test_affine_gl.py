import itertools
import random

import pytest

from superyangian.affine_gl import C, E, Z, LieElement, Unit, bracket, gen_bracket, gen_parity
from superyangian.foundation import ONE, RankData, sign

RANKS = [RankData(3, 2), RankData(2, 3)]


def lie(ctx, *pairs):
    out = LieElement(ctx)
    for k, g in pairs:
        out = out + LieElement.gen(ctx, g, k)
    return out


def test_bracket_examples():
    ctx = RankData(3, 2)
    g = lambda *a: LieElement.gen(ctx, E(*a))
    assert bracket(g(1, 2, 1), g(2, 1, -1)) == lie(ctx, (1, E(1, 1)), (-1, E(2, 2)), (1, C))
    assert bracket(g(1, 5, 2), g(5, 1, -2)) == lie(ctx, (1, E(1, 1)), (1, E(5, 5)), (2, C))
    assert bracket(g(1, 1, 1), g(2, 2, -1)) == lie(ctx, (1, Z))
    assert bracket(LieElement.gen(ctx, C), g(1, 2, 3)).is_zero()
    assert gen_bracket(ctx, E(1, 1, 0), E(1, 1, 0)) == ()


def test_odd_self_bracket_is_anticommutator():
    ctx = RankData(3, 2)
    # [E_{1,4}, E_{4,1}] = E_{1,1} + E_{4,4} for odd units
    assert bracket(LieElement.gen(ctx, E(1, 4)), LieElement.gen(ctx, E(4, 1))) == \
        lie(ctx, (1, E(1, 1)), (1, E(4, 4)))


def _units(ctx, modes):
    return [Unit(s, i, j) for s in modes for i in range(1, ctx.size + 1)
            for j in range(1, ctx.size + 1)]


def _br_dict(ctx, x, ys):
    out = {}
    for y, k in ys.items():
        for g, v in gen_bracket(ctx, x, y):
            out[g] = out.get(g, 0) + k * v
    return {g: v for g, v in out.items() if v}


def _gen_par(ctx, g):
    return gen_parity(ctx, g)


@pytest.mark.parametrize("ctx", RANKS, ids=str)
def test_super_antisymmetry_exhaustive(ctx):
    gens = _units(ctx, range(-3, 4)) + [C, Z]
    for x in gens:
        for y in gens:
            s = -1 if (_gen_par(ctx, x) and _gen_par(ctx, y)) else 1
            lhs = dict(gen_bracket(ctx, x, y))
            rhs = {g: -s * v for g, v in gen_bracket(ctx, y, x)}
            assert lhs == rhs, (x, y)


def _jacobi_term(ctx, x, y, z):
    inner = dict(gen_bracket(ctx, y, z))
    return _br_dict(ctx, x, inner)


@pytest.mark.parametrize("ctx", RANKS, ids=str)
def test_super_jacobi_exhaustive(ctx):
    """(-1)^{|x||z|}[x,[y,z]] + cyclic = 0 on all multisets of generators.

    The cyclic sum is invariant under rotation and changes only by a sign
    under a transposition (given antisymmetry), so multisets suffice.
    """
    gens = _units(ctx, range(-2, 3)) + [C, Z]
    par = {g: _gen_par(ctx, g) for g in gens}
    for x, y, z in itertools.combinations_with_replacement(gens, 3):
        total = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            s = -1 if (par[a] and par[c]) else 1
            for g, v in _jacobi_term(ctx, a, b, c).items():
                total[g] = total.get(g, 0) + s * v
        assert not any(total.values()), (x, y, z)


def test_cocycle_restricted_to_sl():
    """On supertrace-zero loop elements the z-term vanishes and the c-term is u*str(XY)."""
    rng = random.Random(7)
    for ctx in RANKS:
        N = ctx.size
        for _ in range(100):
            u = rng.choice([-3, -2, -1, 1, 2, 3])
            X = _random_sl_matrix(ctx, rng)
            Y = _random_sl_matrix(ctx, rng)
            x = lie(ctx, *[(k, E(i, j, u)) for (i, j), k in X.items()])
            y = lie(ctx, *[(k, E(i, j, -u)) for (i, j), k in Y.items()])
            if x.parity() is None or y.parity() is None:
                continue
            br = dict(bracket(x, y).items())
            assert Z not in br
            want = u * sum(X.get((a, b), 0) * Y.get((b, a), 0) * sign(ctx, a)
                           for a in range(1, N + 1) for b in range(1, N + 1))
            assert br.get(C, 0) == want


def _random_sl_matrix(ctx, rng):
    """Random even supertrace-zero matrix (off-diagonal even entries, traceless diagonal)."""
    N = ctx.size
    M = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i != j and (i <= ctx.m) == (j <= ctx.m) and rng.random() < 0.4:
                M[(i, j)] = rng.randint(-3, 3)
    diag = [rng.randint(-3, 3) for _ in range(N - 1)]
    strace = sum(d * sign(ctx, i + 1) for i, d in enumerate(diag))
    M.update({(i + 1, i + 1): d for i, d in enumerate(diag)})
    M[(N, N)] = -strace * sign(ctx, N)
    return {k: v for k, v in M.items() if v}
