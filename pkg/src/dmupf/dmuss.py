"""Multi-user secret sharing over GF(q^m), one coordinate at a time.

User ``k`` owns a polynomial of degree ``|A_k| - 1`` whose low ``R_k``
coefficients are its secret symbols and whose remaining coefficients are
pads. Every server ``n`` in ``A_k`` must satisfy::

    alpha[k,n] * G_n + sum_{j >= R_k} gamma[k,pos(n)]**j * P[k,j]
        = - sum_{j < R_k} gamma[k,pos(n)]**j * W[k,j]

and a single stored symbol ``G_n`` serves every user that reads server
``n``. Encoding picks a solution of the joint system: the deterministic
particular solution plus a uniform element of the nullspace. Decoding is
Vandermonde interpolation on the user's own servers.

Unknowns are ordered G first (ascending server id over the union of the
access sets), then pads user-major with ascending degree. Secrets are
stacked user-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product

import numpy as np

from .errors import ParamSearchFailed, UsageError
from .linalg import Matrix, invert, nullspace_basis, particular_map, rank, vandermonde

DEFAULT_MAX_RETRIES = 64


@dataclass(frozen=True)
class AccessStructure:
    """``K`` access sets over servers ``1..N``; sets are stored sorted."""

    N: int
    sets: tuple

    def __post_init__(self):
        if self.N < 1:
            raise UsageError(f"server count N={self.N} must be >= 1")
        if not self.sets:
            raise UsageError("need at least one user")
        norm = []
        for k, s in enumerate(self.sets):
            s = tuple(sorted(set(int(n) for n in s)))
            if not s:
                raise UsageError(f"access set of user {k + 1} is empty")
            if s[0] < 1 or s[-1] > self.N:
                raise UsageError(f"access set of user {k + 1} has servers outside [1, {self.N}]")
            norm.append(s)
        object.__setattr__(self, "sets", tuple(norm))

    @property
    def K(self):
        return len(self.sets)

    @cached_property
    def union(self):
        return tuple(sorted(set().union(*self.sets)))

    def pos(self, k, n):
        """1-based position of server ``n`` within the sorted ``A_k``."""
        try:
            return self.sets[k].index(n) + 1
        except ValueError:
            raise UsageError(f"server {n} is not in the access set of user {k + 1}") from None

    def users_of(self, n):
        return [k for k, s in enumerate(self.sets) if n in s]


def check_rates(acc, R):
    R = tuple(int(r) for r in R)
    if len(R) != acc.K:
        raise UsageError(f"expected {acc.K} rates, got {len(R)}")
    for k, (r, s) in enumerate(zip(R, acc.sets)):
        if r < 1:
            raise UsageError(f"R_{k + 1}={r} must be >= 1")
        if r > len(s):
            raise UsageError(f"R_{k + 1}={r} exceeds |A_{k + 1}|={len(s)}")
    return R


@dataclass
class ValidationReport:
    decodable: bool
    private: bool
    rows: int = 0
    cols: int = 0
    rank: int = 0
    failed_pairs: list = field(default_factory=list)  # (k, k_tilde), 0-based
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return self.decodable and self.private

    @property
    def failing_check(self):
        if not self.decodable:
            return "decodability"
        if not self.private:
            return "privacy"
        return None

    def to_dict(self):
        return {
            "decodability": "pass" if self.decodable else "fail",
            "privacy": "pass" if self.private else "fail",
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "failed_pairs": [[k + 1, kt + 1] for k, kt in self.failed_pairs],
            "problems": list(self.problems),
        }


@dataclass(frozen=True, eq=False)
class SchemeParams:
    """Evaluation points for every user plus the encoding system derived from them.

    ``alpha[k][i]`` and ``gamma[k][i]`` belong to the ``i``-th server of the
    sorted ``A_k``.
    """

    ctx: object
    acc: AccessStructure
    R: tuple
    alpha: tuple
    gamma: tuple
    attempts: int = 0

    def __post_init__(self):
        object.__setattr__(self, "R", check_rates(self.acc, self.R))
        object.__setattr__(self, "alpha", tuple(tuple(int(a) for a in al) for al in self.alpha))
        object.__setattr__(self, "gamma", tuple(tuple(int(g) for g in gm) for gm in self.gamma))
        if len(self.alpha) != self.acc.K or len(self.gamma) != self.acc.K:
            raise UsageError("need one alpha and one gamma tuple per user")
        for k, s in enumerate(self.acc.sets):
            if len(self.alpha[k]) != len(s) or len(self.gamma[k]) != len(s):
                raise UsageError(f"user {k + 1}: alpha/gamma length must equal |A_k|={len(s)}")
            for x in self.alpha[k] + self.gamma[k]:
                self.ctx.check(x)

    def __eq__(self, other):
        return (isinstance(other, SchemeParams) and self.ctx == other.ctx
                and self.acc == other.acc and self.R == other.R
                and self.alpha == other.alpha and self.gamma == other.gamma)

    def __hash__(self):
        return hash((self.acc, self.R, self.alpha, self.gamma))

    def alpha_of(self, k, n):
        return self.alpha[k][self.acc.pos(k, n) - 1]

    def gamma_of(self, k, n):
        return self.gamma[k][self.acc.pos(k, n) - 1]

    # -- layout ------------------------------------------------------------------

    @cached_property
    def g_index(self):
        return {n: i for i, n in enumerate(self.acc.union)}

    @cached_property
    def pad_offsets(self):
        out, off = [], len(self.acc.union)
        for k, s in enumerate(self.acc.sets):
            out.append(off)
            off += len(s) - self.R[k]
        return tuple(out)

    @cached_property
    def n_unknowns(self):
        return len(self.acc.union) + sum(len(s) - r for s, r in zip(self.acc.sets, self.R))

    @cached_property
    def secret_offsets(self):
        out, off = [], 0
        for r in self.R:
            out.append(off)
            off += r
        return tuple(out)

    @property
    def n_secrets(self):
        return sum(self.R)

    def stack(self, blocks):
        if len(blocks) != self.acc.K:
            raise UsageError(f"need {self.acc.K} blocks, got {len(blocks)}")
        out = []
        for k, blk in enumerate(blocks):
            if len(blk) != self.R[k]:
                raise UsageError(f"block of user {k + 1} has length {len(blk)}, expected {self.R[k]}")
            out.extend(int(x) for x in blk)
        return tuple(out)

    # -- derived matrices -------------------------------------------------------

    @cached_property
    def system(self):
        return build_system(self.acc, self.R, self)

    @cached_property
    def nullspace(self):
        return nullspace_basis(self.system[0])

    @cached_property
    def particular(self):
        """Linear map from stacked secrets to the particular solution of the system."""
        Msys, inj = self.system
        return particular_map(Msys, inj)

    @cached_property
    def vandermonde_inverses(self):
        return tuple(invert(vandermonde(self.ctx, g, len(g))) for g in self.gamma)

    def truncated_inverse(self, k, size):
        """Inverse Vandermonde on the first ``size`` points of user ``k``."""
        return invert(vandermonde(self.ctx, self.gamma[k][:size], size))

    def observer_rows(self, k_tilde):
        """Row indices of the unknown vector holding ``G_n`` for ``n`` in ``A_{k_tilde}``."""
        return [self.g_index[n] for n in self.acc.sets[k_tilde]]

    def to_dict(self):
        return {
            "alpha": [{str(n): a for n, a in zip(s, al)} for s, al in zip(self.acc.sets, self.alpha)],
            "gamma": [list(g) for g in self.gamma],
        }


def build_system(acc, R, params):
    """Coefficient matrix of the joint encoding system and the secret injection map.

    One row per (user, server in its access set). Returns ``(Msys, inj)``
    with ``Msys @ u == inj @ secrets`` for every valid encoding ``u``.
    """
    ctx = params.ctx
    R = check_rates(acc, R)
    g_index = {n: i for i, n in enumerate(acc.union)}
    n_cols = len(acc.union) + sum(len(s) - r for s, r in zip(acc.sets, R))
    n_sec = sum(R)
    rows, inj = [], []
    pad_off, sec_off = len(acc.union), 0
    for k, s in enumerate(acc.sets):
        for i, n in enumerate(s):
            row, irow = [0] * n_cols, [0] * n_sec
            row[g_index[n]] = params.alpha[k][i]
            g = params.gamma[k][i]
            for j in range(len(s)):
                gj = ctx.pow(g, j)
                if j < R[k]:
                    irow[sec_off + j] = ctx.neg(gj)
                else:
                    row[pad_off + j - R[k]] = gj
            rows.append(row)
            inj.append(irow)
        pad_off += len(s) - R[k]
        sec_off += R[k]
    return Matrix(ctx, rows, cols=n_cols), Matrix(ctx, inj, cols=n_sec)


def _column_space_contains(big, small):
    """True iff every column of ``small`` lies in the column space of ``big``."""
    if small.cols == 0:
        return True
    return rank(big.hstack(small)) == rank(big)


def param_validate(acc, R, params):
    """Check decodability and pairwise privacy of a parameter set.

    Decodability: alphas nonzero, each user's gammas distinct and nonzero,
    and the joint system has full row rank. Privacy for the pair (k, k~):
    the contribution of user k's secrets to ``G_{A_k~}`` lies in the span
    of the nullspace restricted to those same rows, so the uniform
    nullspace component hides it.
    """
    R = check_rates(acc, R)
    report = ValidationReport(decodable=True, private=True)
    for k in range(acc.K):
        if any(a == 0 for a in params.alpha[k]):
            report.problems.append(f"user {k + 1}: zero alpha")
            report.decodable = False
        g = params.gamma[k]
        if any(x == 0 for x in g):
            report.problems.append(f"user {k + 1}: zero gamma")
            report.decodable = False
        if len(set(g)) != len(g):
            report.problems.append(f"user {k + 1}: repeated gamma")
            report.decodable = False
    Msys, inj = build_system(acc, R, params)
    report.rows, report.cols = Msys.rows, Msys.cols
    report.rank = rank(Msys)
    if report.rank < Msys.rows:
        report.problems.append(f"system rank {report.rank} < {Msys.rows} equations")
        report.decodable = False
    try:
        P = particular_map(Msys, inj)
    except UsageError:
        report.private = False
        report.problems.append("privacy not evaluable: some secret assignment is not encodable")
        return report
    Nns = nullspace_basis(Msys)
    offs = [sum(R[:k]) for k in range(acc.K)]
    g_index = {n: i for i, n in enumerate(acc.union)}
    for k in range(acc.K):
        Pk = P.select_columns(range(offs[k], offs[k] + R[k]))
        for kt in range(acc.K):
            if kt == k:
                continue
            sel = [g_index[n] for n in acc.sets[kt]]
            if not _column_space_contains(Nns.select_rows(sel), Pk.select_rows(sel)):
                report.failed_pairs.append((k, kt))
    if report.failed_pairs:
        report.private = False
        report.problems.append("privacy fails for pairs "
                               + ", ".join(f"({k + 1},{kt + 1})" for k, kt in report.failed_pairs))
    return report


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _sample_once(acc, ctx, rng):
    alpha, gamma = [], []
    nonzero = np.arange(1, ctx.order, dtype=np.uint64) if ctx.order <= 2**20 else None
    for s in acc.sets:
        alpha.append(tuple(ctx.sample(rng, nonzero=True) for _ in s))
        if nonzero is not None:
            gamma.append(tuple(int(x) for x in rng.choice(nonzero, size=len(s), replace=False)))
        else:
            picked = []
            while len(picked) < len(s):
                x = ctx.sample(rng, nonzero=True)
                if x not in picked:
                    picked.append(x)
            gamma.append(tuple(picked))
    return tuple(alpha), tuple(gamma)


def param_sample(acc, R, ctx, rng=0, max_retries=DEFAULT_MAX_RETRIES, check_privacy=True):
    """Sample (alpha, gamma) until :func:`param_validate` accepts them.

    ``rng`` is a seed or a ``numpy.random.Generator``. With
    ``check_privacy=False`` only decodability is required (debugging aid).
    Raises :class:`ParamSearchFailed` after ``max_retries`` rejected samples.
    """
    R = check_rates(acc, R)
    need = max(len(s) for s in acc.sets)
    if ctx.order - 1 < need:
        raise UsageError(f"{ctx!r} has {ctx.order - 1} nonzero elements; "
                         f"need {need} distinct evaluation points")
    rng = _as_rng(rng)
    report = None
    for attempt in range(1, max_retries + 1):
        alpha, gamma = _sample_once(acc, ctx, rng)
        params = SchemeParams(ctx, acc, R, alpha, gamma, attempts=attempt)
        report = param_validate(acc, R, params)
        if report.decodable and (report.private or not check_privacy):
            return params
    raise ParamSearchFailed(
        f"no valid parameters after {max_retries} samples; failing check: {report.failing_check}",
        report=report, attempts=max_retries)


def adversarial_params(acc, R, ctx, limit=10_000):
    """First parameter set (in a fixed search order) that decodes but is *not* private.

    Alphas are all one; gamma tuples are scanned in lexicographic order.
    Used as a negative control for the privacy verifiers.
    """
    R = check_rates(acc, R)
    nonzero = list(ctx.nonzero())
    alpha = tuple((1,) * len(s) for s in acc.sets)
    per_user = [permutations(nonzero, len(s)) for s in acc.sets]
    for i, gamma in enumerate(product(*per_user)):
        if i >= limit:
            break
        params = SchemeParams(ctx, acc, R, alpha, gamma)
        rep = param_validate(acc, R, params)
        if rep.decodable and not rep.private:
            return params
    raise ParamSearchFailed("no decodable, non-private parameter set found")


def encode_unknowns(params, blocks, nu=None):
    """Full solution vector (G values then pads) for one coordinate."""
    s = params.stack(blocks)
    u = params.particular.apply(s) if s else (0,) * params.n_unknowns
    Nns = params.nullspace
    if Nns.cols:
        if nu is None:
            raise UsageError("nu is required when the system has a nullspace")
        if len(nu) != Nns.cols:
            raise UsageError(f"nu has length {len(nu)}, nullity is {Nns.cols}")
        ctx = params.ctx
        u = tuple(ctx.add(a, b) for a, b in zip(u, Nns.apply(nu)))
    return u


def enc_coordinate(params, blocks, rng=None, nu=None, fill=None):
    """Shares ``(G_1, ..., G_N)`` of one coordinate for the given per-user blocks.

    ``nu`` (nullspace coefficients) and ``fill`` (values for servers no user
    reads) default to uniform draws from ``rng``.
    """
    ctx, acc = params.ctx, params.acc
    outside = [n for n in range(1, acc.N + 1) if n not in params.g_index]
    if nu is None:
        if rng is None:
            raise UsageError("need rng or explicit nu")
        nu = tuple(ctx.sample(rng) for _ in range(params.nullspace.cols))
    if fill is None:
        if rng is None and outside:
            raise UsageError("need rng or explicit fill")
        fill = tuple(ctx.sample(rng) for _ in outside)
    if len(fill) != len(outside):
        raise UsageError(f"fill has length {len(fill)}, {len(outside)} servers are unread")
    u = encode_unknowns(params, blocks, nu)
    fill_of = dict(zip(outside, fill))
    return tuple(u[params.g_index[n]] if n in params.g_index else int(fill_of[n])
                 for n in range(1, acc.N + 1))


def dec(params, k, shares):
    """Recover user ``k``'s block from ``{n: G_n}`` for every ``n`` in ``A_k``."""
    ctx = params.ctx
    s_vals = []
    for i, n in enumerate(params.acc.sets[k]):
        if n not in shares:
            raise UsageError(f"missing share of server {n} for user {k + 1}")
        s_vals.append(ctx.neg(ctx.mul(params.alpha[k][i], shares[n])))
    coeffs = params.vandermonde_inverses[k].apply(s_vals)
    return coeffs[:params.R[k]]


def shares_for(params, k, g):
    """Slice the shares user ``k`` can read out of a full ``(G_1..G_N)`` tuple."""
    return {n: g[n - 1] for n in params.acc.sets[k]}


def residual_ok(params, blocks, u):
    """Plug ``u`` back into every per-server equation, without going through ``Msys``."""
    ctx, acc = params.ctx, params.acc
    for k, s in enumerate(acc.sets):
        pads = u[params.pad_offsets[k]:params.pad_offsets[k] + len(s) - params.R[k]]
        poly = tuple(blocks[k]) + tuple(pads)
        for i, n in enumerate(s):
            g = params.gamma[k][i]
            value = 0
            for j, c in enumerate(poly):
                value = ctx.add(value, ctx.mul(c, ctx.pow(g, j)))
            if ctx.neg(ctx.mul(params.alpha[k][i], u[params.g_index[n]])) != value:
                return False
    return True


__all__ = [
    "AccessStructure", "SchemeParams", "ValidationReport", "build_system", "param_sample",
    "param_validate", "adversarial_params", "enc_coordinate", "encode_unknowns", "dec",
    "shares_for", "residual_ok", "check_rates",
]
