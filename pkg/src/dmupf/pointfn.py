"""Point functions and their lifting to vectors.

A point function ``f_{X,Z}`` on ``[T]`` returns the nonzero block ``Z`` at
``X`` and the zero block elsewhere. Blocks are tuples of ``R`` base-field
symbols; the protocol never multiplies blocks together, so no arithmetic
in GF(q^{mR}) is needed.

:func:`e_map` and :func:`f_eval` implement the degree-``d`` encoding: the
index ``X`` is sent to a weight-``d`` 0/1 vector ``tau(X)`` and one of its
ones is replaced by ``Z``; a fixed polynomial of total degree ``d`` then
reads ``Z * x_X`` back out. The protocol uses ``d = 1`` with ``H = T``,
where the encoding is just :func:`secret_vector`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice, product
from math import comb

from .errors import CapacityError, UsageError


@dataclass(frozen=True)
class PointFunction:
    """``f_{X,Z}: [T] -> F^R`` with ``1 <= X <= T`` and ``Z`` a nonzero block."""

    T: int
    X: int
    Z: tuple

    def __post_init__(self):
        object.__setattr__(self, "Z", tuple(int(z) for z in self.Z))
        if self.T < 1:
            raise UsageError(f"domain size T={self.T} must be >= 1")
        if not 1 <= self.X <= self.T:
            raise UsageError(f"X={self.X} outside [1, {self.T}]")
        if not self.Z:
            raise UsageError("Z must have at least one symbol")
        if not any(self.Z):
            raise UsageError("Z must be a nonzero block")

    @property
    def R(self):
        return len(self.Z)

    def __call__(self, V):
        return eval_point_function(self, V)


def eval_point_function(f, V):
    if not 1 <= V <= f.T:
        raise UsageError(f"V={V} outside [1, {f.T}]")
    return f.Z if V == f.X else (0,) * f.R


def random_point_function(ctx, T, R, rng):
    X = int(rng.integers(1, T + 1))
    return PointFunction(T, X, ctx.sample_block(rng, R, nonzero=True))


def all_point_functions(ctx, T, R):
    """Every ``f_{X,Z}`` on ``[T]`` with ``R``-symbol range, X-major then Z in radix order."""
    out = []
    for X in range(1, T + 1):
        for Z in product(ctx.elements(), repeat=R):
            if any(Z):
                out.append(PointFunction(T, X, Z))
    return out


@dataclass(frozen=True)
class MappingSpec:
    H: int
    d: int
    basis: tuple  # basis[i-1] is tau(i), a 0/1 tuple of length H

    @property
    def T(self):
        return len(self.basis)

    def support(self, i):
        return tuple(l for l, b in enumerate(self.basis[i - 1]) if b)


def build_mapping(T, H, d):
    """First ``T`` weight-``d`` vectors of length ``H``, ordered lexicographically by support."""
    if T < 1 or H < 1 or not 1 <= d <= H:
        raise UsageError(f"invalid mapping parameters T={T}, H={H}, d={d}")
    if comb(H, d) < T:
        raise CapacityError(f"C({H},{d}) = {comb(H, d)} < T = {T}")
    basis = []
    for supp in islice(combinations(range(H), d), T):
        v = [0] * H
        for l in supp:
            v[l] = 1
        basis.append(tuple(v))
    return MappingSpec(H, d, tuple(basis))


def e_map(X, Z, spec):
    """Lift ``(X, Z)`` to an ``H``-vector: ``tau(X)`` with its last one replaced by ``Z``.

    ``Z`` may be a scalar (returns scalars) or a block (returns blocks, where
    a one becomes ``(1, 0, ..., 0)``). Blocks longer than one symbol are only
    allowed for ``d == 1``.
    """
    if not 1 <= X <= spec.T:
        raise UsageError(f"X={X} outside [1, {spec.T}]")
    scalar = not isinstance(Z, (tuple, list))
    block = (int(Z),) if scalar else tuple(int(z) for z in Z)
    if not any(block):
        raise UsageError("Z must be nonzero")
    if spec.d >= 2 and len(block) != 1:
        raise UsageError("degree d >= 2 needs a scalar Z")
    R = len(block)
    zero, one = (0,) * R, (1,) + (0,) * (R - 1)
    out = [one if b else zero for b in spec.basis[X - 1]]
    out[spec.support(X)[-1]] = block
    if scalar:
        return tuple(b[0] for b in out)
    return tuple(out)


def f_eval(x, z, spec, ctx):
    """Evaluate ``sum_{i in [T]} x_i * prod_l z_l ** tau(i)_l`` over scalars.

    ``x`` carries one weight per domain index, so it has length ``T``; a
    length-``H`` vector is also accepted when ``H >= T`` (the tail is unused).
    """
    if len(z) != spec.H:
        raise UsageError(f"z must have length H={spec.H}")
    if len(x) not in (spec.T, spec.H) or len(x) < spec.T:
        raise UsageError(f"x must have length T={spec.T}")
    total = 0
    for i in range(1, spec.T + 1):
        xi = x[i - 1]
        if not xi:
            continue
        term = xi
        for l in spec.support(i):
            term = ctx.mul(term, z[l])
        total = ctx.add(total, term)
    return total


def secret_vector(f):
    """The ``d = 1``, ``H = T`` lift of ``f``: block ``X`` is ``Z``, the rest are zero."""
    zero = (0,) * f.R
    return tuple(f.Z if t == f.X else zero for t in range(1, f.T + 1))


def point_from_vector(w):
    """Inverse of :func:`secret_vector`."""
    nonzero = [t for t, blk in enumerate(w, start=1) if any(blk)]
    if len(nonzero) != 1:
        raise UsageError(f"expected exactly one nonzero block, found {len(nonzero)}")
    X = nonzero[0]
    return PointFunction(len(w), X, w[X - 1])
