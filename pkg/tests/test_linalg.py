import itertools

import numpy as np
import pytest

from conftest import naive_rank
from dmupf.errors import SingularMatrixError, UsageError
from dmupf.field import GF
from dmupf.linalg import (Matrix, invert, nullspace_basis, particular_map, rank, rref,
                          solve_particular, vandermonde, vec_add)


def random_matrix(ctx, gen, rows, cols, sparse=0.0):
    data = [[0 if gen.random() < sparse else ctx.sample(gen) for _ in range(cols)]
            for _ in range(rows)]
    return Matrix(ctx, data, cols=cols)


def test_rank_examples(gf7):
    assert rank(Matrix.zeros(gf7, 3, 3)) == 0
    assert rank(Matrix.identity(gf7, 4)) == 4
    assert rank(Matrix(gf7, [[1, 2], [2, 4]])) == 1


def test_solve_examples(gf7):
    b = (3, 0, 6)
    assert solve_particular(Matrix.identity(gf7, 3), b) == b
    assert solve_particular(Matrix.zeros(gf7, 2, 2), (0, 0)) == (0, 0)
    assert solve_particular(Matrix(gf7, [[1, 1], [2, 2]]), (1, 3)) is None
    with pytest.raises(UsageError):
        solve_particular(Matrix.identity(gf7, 2), (1, 2, 3))


def test_nullspace_examples(gf7):
    assert nullspace_basis(Matrix.identity(gf7, 4)).cols == 0
    N = nullspace_basis(Matrix.zeros(gf7, 2, 3))
    assert N.cols == 3 and rank(N) == 3
    M = Matrix(gf7, [[1, 2, 3]])
    N = nullspace_basis(M)
    assert N.cols == 2
    for u in N.columns():
        assert M.apply(u) == (0,)


def test_vandermonde_examples(gf7):
    V = vandermonde(gf7, (1, 2, 3), 3)
    assert V.data == ((1, 1, 1), (1, 2, 4), (1, 3, 2))
    assert vandermonde(gf7, (5,), 1).data == ((1,),)
    assert vandermonde(gf7, (0, 2), 3).row(0) == (1, 0, 0)


def test_invert_examples(gf7):
    I = Matrix.identity(gf7, 3)
    assert invert(I) == I
    V = vandermonde(gf7, (1, 2, 3), 3)
    assert V @ invert(V) == I and invert(V) @ V == I
    with pytest.raises(SingularMatrixError):
        invert(vandermonde(gf7, (1, 1), 2))


@pytest.mark.parametrize("ctx", [GF(7), GF(3, 2)], ids=["GF7", "GF9"])
def test_random_inversion_and_rank(ctx):
    gen = np.random.default_rng(ctx.order)
    singular = 0
    for trial in range(500):
        n = int(gen.integers(1, 7))
        M = random_matrix(ctx, gen, n, n, sparse=0.3 if trial % 2 else 0.0)
        r = rank(M)
        try:
            Minv = invert(M)
        except SingularMatrixError:
            singular += 1
            assert r < n
            continue
        assert r == n
        I = Matrix.identity(ctx, n)
        assert Minv @ M == I and M @ Minv == I
    assert singular > 0  # the sparse draws must exercise the failure path


def test_rank_against_brute_force():
    ctx = GF(3)
    gen = np.random.default_rng(2)
    for _ in range(40):
        r, c = int(gen.integers(1, 4)), int(gen.integers(1, 5))
        M = random_matrix(ctx, gen, r, c, sparse=0.4)
        assert rank(M) == naive_rank(ctx, M.data)


@pytest.mark.parametrize("ctx", [GF(7), GF(3, 2)], ids=["GF7", "GF9"])
def test_solve_nullspace_and_linearity(ctx):
    gen = np.random.default_rng(17)
    for _ in range(150):
        r, c = int(gen.integers(1, 6)), int(gen.integers(1, 7))
        M = random_matrix(ctx, gen, r, c, sparse=0.3)
        N = nullspace_basis(M)
        assert N.cols + rank(M) == c
        for u in N.columns():
            assert not any(M.apply(u))
        if N.cols:
            assert rank(N) == N.cols
        # right-hand sides in the column space are always solvable
        x1 = tuple(ctx.sample(gen) for _ in range(c))
        x2 = tuple(ctx.sample(gen) for _ in range(c))
        b1, b2 = M.apply(x1), M.apply(x2)
        u1, u2 = solve_particular(M, b1), solve_particular(M, b2)
        assert M.apply(u1) == b1 and M.apply(u2) == b2
        assert solve_particular(M, vec_add(ctx, b1, b2)) == vec_add(ctx, u1, u2)


def test_solve_none_iff_augmented_rank_grows(gf7):
    gen = np.random.default_rng(4)
    for _ in range(200):
        M = random_matrix(gf7, gen, 4, 3, sparse=0.5)
        b = tuple(gf7.sample(gen) for _ in range(4))
        aug = M.hstack(Matrix(gf7, [[x] for x in b]))
        assert (solve_particular(M, b) is None) == (rank(aug) > rank(M))


def test_particular_map_is_linear(gf7):
    gen = np.random.default_rng(9)
    M = random_matrix(gf7, gen, 3, 5)
    rhs = M @ random_matrix(gf7, gen, 5, 2)
    P = particular_map(M, rhs)
    for _ in range(20):
        s = tuple(gf7.sample(gen) for _ in range(2))
        assert solve_particular(M, rhs.apply(s)) == P.apply(s)
    with pytest.raises(UsageError):
        particular_map(Matrix(gf7, [[1, 1], [2, 2]]), Matrix(gf7, [[1], [3]]))


def test_rref_deterministic_and_reduced(gf7):
    gen = np.random.default_rng(21)
    M = random_matrix(gf7, gen, 4, 6, sparse=0.3)
    R1, p1 = rref(M)
    R2, p2 = rref(M)
    assert R1 == R2 and p1 == p2
    for i, c in enumerate(p1):
        assert R1[i, c] == 1
        assert all(R1[j, c] == 0 for j in range(R1.rows) if j != i)


def test_vandermonde_distinct_points_always_invertible():
    ctx = GF(7)
    for n in range(1, 8):
        for pts in itertools.combinations(range(7), n):
            V = vandermonde(ctx, pts, n)
            assert V @ invert(V) == Matrix.identity(ctx, n)
