"""Shared fixtures and independent oracles for the test suite."""

import itertools

import numpy as np
import pytest

from dmupf.field import GF


class NaiveField:
    """Schoolbook GF(q^m) on coefficient lists, written independently of dmupf.field.

    Elements use the same radix-q integer index so results can be compared.
    """

    def __init__(self, q, modulus):
        self.q = q
        self.modulus = list(modulus)
        self.m = len(modulus) - 1

    def to_poly(self, a):
        out = []
        for _ in range(self.m):
            out.append(a % self.q)
            a //= self.q
        return out

    def to_int(self, p):
        return sum(c * self.q**i for i, c in enumerate(p))

    def add(self, a, b):
        pa, pb = self.to_poly(a), self.to_poly(b)
        return self.to_int([(x + y) % self.q for x, y in zip(pa, pb)])

    def mul(self, a, b):
        pa, pb = self.to_poly(a), self.to_poly(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(pa):
            for j, y in enumerate(pb):
                prod[i + j] += x * y
        # reduce from the top using x^m = -(lower terms of modulus)
        for deg in range(len(prod) - 1, self.m - 1, -1):
            c = prod[deg] % self.q
            prod[deg] = 0
            for i in range(self.m):
                prod[deg - self.m + i] -= c * self.modulus[i]
        return self.to_int([c % self.q for c in prod[: self.m]])

    def inv(self, a):
        for b in range(1, self.q**self.m):
            if self.mul(a, b) == 1:
                return b
        raise ZeroDivisionError(a)


def naive_of(ctx):
    return NaiveField(ctx.q, ctx.modulus)


def naive_rank(ctx, rows):
    """Rank by brute force: largest k such that some k rows are independent,
    independence tested by enumerating all nonzero coefficient vectors."""
    rows = [tuple(r) for r in rows]
    elems = range(ctx.order)

    def independent(sub):
        for coeffs in itertools.product(elems, repeat=len(sub)):
            if not any(coeffs):
                continue
            acc = [0] * len(sub[0])
            for c, r in zip(coeffs, sub):
                acc = [ctx.add(a, ctx.mul(c, x)) for a, x in zip(acc, r)]
            if not any(acc):
                return False
        return True

    best = 0
    for k in range(1, len(rows) + 1):
        if any(independent(sub) for sub in itertools.combinations(rows, k)):
            best = k
        else:
            break
    return best


@pytest.fixture
def gf7():
    return GF(7)


@pytest.fixture
def gf9():
    # the x^2 + 1 presentation used by the worked examples
    return GF(3, 2, (1, 0, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
