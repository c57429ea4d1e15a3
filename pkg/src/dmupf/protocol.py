"""Placement, demand, evaluation and retrieval as an in-memory simulation.

One run is single threaded and deterministic in ``cfg.seed``. Randomness is
split with ``numpy.random.SeedSequence``: one stream for parameter search
and one independent stream per coordinate for encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .dmuss import AccessStructure, check_rates, enc_coordinate, param_sample
from .errors import AccessViolation, UsageError
from .pointfn import eval_point_function, random_point_function, secret_vector

EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class ProtocolConfig:
    ctx: object
    T: int
    acc: AccessStructure
    R: tuple
    seed: int
    functions: tuple
    demands: object  # tuple of V_k, or EXHAUSTIVE
    max_retries: int = 64

    def __post_init__(self):
        object.__setattr__(self, "R", check_rates(self.acc, self.R))
        object.__setattr__(self, "functions", tuple(self.functions))
        if self.T < 1:
            raise UsageError(f"T={self.T} must be >= 1")
        if len(self.functions) != self.acc.K:
            raise UsageError(f"need {self.acc.K} point functions, got {len(self.functions)}")
        for k, f in enumerate(self.functions):
            if f.T != self.T:
                raise UsageError(f"function of user {k + 1} has domain {f.T}, expected {self.T}")
            if f.R != self.R[k]:
                raise UsageError(f"function of user {k + 1} has R={f.R}, expected R_{k + 1}={self.R[k]}")
            for z in f.Z:
                self.ctx.check(z)
        if self.demands != EXHAUSTIVE:
            demands = tuple(int(v) for v in self.demands)
            if len(demands) != self.acc.K:
                raise UsageError(f"need {self.acc.K} demands, got {len(demands)}")
            for k, v in enumerate(demands):
                if not 1 <= v <= self.T:
                    raise UsageError(f"demand V_{k + 1}={v} outside [1, {self.T}]")
            object.__setattr__(self, "demands", demands)

    @property
    def storage_digits(self):
        """Per-server storage M in q-ary digits: T symbols of GF(q^m)."""
        return self.T * self.ctx.m

    @classmethod
    def with_random_functions(cls, ctx, T, acc, R, seed, demands, **kw):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
        R = check_rates(acc, R)
        functions = tuple(random_point_function(ctx, T, r, rng) for r in R)
        return cls(ctx, T, acc, R, seed, functions, demands, **kw)


class ServerStore:
    """Server ``n``'s share vector ``(G_{n,1}, ..., G_{n,T})`` with a read counter."""

    def __init__(self, n, G):
        self.n = n
        self._G = tuple(G)
        self.reads = 0

    def __len__(self):
        return len(self._G)

    def read(self, t):
        self.reads += 1
        return self._G[t - 1]

    @property
    def G(self):
        return self._G

    def corrupted(self, t, value):
        G = list(self._G)
        G[t - 1] = value
        return ServerStore(self.n, G)

    def __eq__(self, other):
        return isinstance(other, ServerStore) and (self.n, self._G) == (other.n, other._G)

    def __repr__(self):
        return f"ServerStore(n={self.n}, G={self._G})"


@dataclass(frozen=True)
class Demand:
    k: int
    n: int
    V: int


@dataclass(frozen=True)
class Response:
    k: int
    n: int
    c: tuple


@dataclass
class Transcript:
    params: object
    stores: list
    demands: list = field(default_factory=list)
    responses: list = field(default_factory=list)
    rounds: list = field(default_factory=list)  # one entry per demand vector

    @property
    def all_correct(self):
        return all(all(u["correct"] for u in r["users"]) for r in self.rounds)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "stores": {str(s.n): list(s.G) for s in self.stores},
            "rounds": self.rounds,
            "all_correct": self.all_correct,
        }


def placement(cfg):
    """Sample parameters and encode every user's lifted point function, coordinate by coordinate."""
    from .analysis import check_R_feasible

    verdict = check_R_feasible(cfg.acc, cfg.R)
    if not verdict.feasible:
        raise UsageError("rate tuple violates the capacity bounds: " + "; ".join(verdict.violations))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.T + 1)
    params = param_sample(cfg.acc, cfg.R, cfg.ctx, np.random.default_rng(seeds[0]),
                          max_retries=cfg.max_retries)
    return params, encode_stores(params, cfg.functions, cfg.T, seeds[1:])


def encode_stores(params, functions, T, seeds):
    ws = [secret_vector(f) for f in functions]
    columns = []
    for t in range(1, T + 1):
        rng = np.random.default_rng(seeds[t - 1])
        columns.append(enc_coordinate(params, [w[t - 1] for w in ws], rng))
    return [ServerStore(n, [col[n - 1] for col in columns]) for n in range(1, params.acc.N + 1)]


def demand(acc, k, V, T):
    if not 1 <= V <= T:
        raise UsageError(f"demand V={V} outside [1, {T}]")
    return [Demand(k, n, V) for n in acc.sets[k]]


def evaluate(n, k, V, params, store):
    """Server ``n``'s answer to user ``k``: ``-alpha * Ik[j, pos] * G_{n,V}`` for ``j < R_k``."""
    if n not in params.acc.sets[k]:
        raise AccessViolation(f"server {n} is not in the access set of user {k + 1}")
    ctx = params.ctx
    i = params.acc.pos(k, n) - 1
    g = store.read(V)
    base = ctx.neg(ctx.mul(params.alpha[k][i], g))
    Ik = params.vandermonde_inverses[k]
    return Response(k, n, tuple(ctx.mul(Ik[j, i], base) for j in range(params.R[k])))


def retrieve(k, responses, params):
    """Symbol-wise sum of the responses from every server in ``A_k``."""
    ctx = params.ctx
    got = {r.n: r for r in responses if r.k == k}
    missing = [n for n in params.acc.sets[k] if n not in got]
    if missing:
        raise UsageError(f"user {k + 1} is missing responses from servers {missing}")
    out = [0] * params.R[k]
    for n in params.acc.sets[k]:
        for j, c in enumerate(got[n].c):
            out[j] = ctx.add(out[j], c)
    return tuple(out)


def peeling_retrieve(k, V, params, stores):
    """Experimental level-by-level retrieval over shrinking server sets.

    Level ``j`` uses only the first ``|A_k| - j`` servers of ``A_k`` and the
    inverse Vandermonde on their points. Each level needs the already
    recovered coefficients fed back to the servers, which strip them before
    answering. Returns ``(block, per-level responses)``.
    """
    ctx = params.ctx
    s = params.acc.sets[k]
    recovered, levels = [], []
    for j in range(params.R[k]):
        size = len(s) - j
        inv = params.truncated_inverse(k, size)
        level = {}
        for i, n in enumerate(s[:size]):
            gamma = params.gamma[k][i]
            val = ctx.neg(ctx.mul(params.alpha[k][i], stores[n - 1].read(V)))
            for l, w in enumerate(recovered):
                val = ctx.sub(val, ctx.mul(w, ctx.pow(gamma, l)))
            val = ctx.mul(val, ctx.pow(ctx.inv(gamma), j))
            level[n] = ctx.mul(inv[0, i], val)
        total = 0
        for c in level.values():
            total = ctx.add(total, c)
        recovered.append(total)
        levels.append(level)
    return tuple(recovered), levels


def demand_vectors(cfg):
    if cfg.demands == EXHAUSTIVE:
        return list(product(range(1, cfg.T + 1), repeat=cfg.acc.K))
    return [cfg.demands]


def run_round(cfg, params, stores, V, transcript=None, peeling=False):
    """One demand/evaluate/retrieve round for the demand vector ``V``."""
    acc = params.acc
    users = []
    for k in range(acc.K):
        msgs = demand(acc, k, V[k], cfg.T)
        if peeling:
            U, levels = peeling_retrieve(k, V[k], params, stores)
            responses = [Response(k, n, tuple(lvl[n] for lvl in levels if n in lvl))
                         for n in acc.sets[k]]
        else:
            responses = [evaluate(m.n, k, m.V, params, stores[m.n - 1]) for m in msgs]
            U = retrieve(k, responses, params)
        expected = eval_point_function(cfg.functions[k], V[k])
        if transcript is not None:
            transcript.demands.extend(msgs)
            transcript.responses.extend(responses)
        users.append({
            "user": k + 1,
            "V": V[k],
            "responses": {str(r.n): list(r.c) for r in responses},
            "retrieved": list(U),
            "expected": list(expected),
            "correct": U == expected,
        })
    round_ = {"V": list(V), "users": users}
    if transcript is not None:
        transcript.rounds.append(round_)
    return round_


def run(cfg, peeling=False, stores=None, params=None):
    """Full protocol run; ``stores``/``params`` override placement (e.g. tampering tests)."""
    if stores is None or params is None:
        params, stores = placement(cfg)
    transcript = Transcript(params=params, stores=stores)
    for V in demand_vectors(cfg):
        run_round(cfg, params, stores, V, transcript, peeling=peeling)
    return transcript


__all__ = [
    "EXHAUSTIVE", "ProtocolConfig", "ServerStore", "Demand", "Response", "Transcript",
    "placement", "encode_stores", "demand", "evaluate", "retrieve", "peeling_retrieve",
    "run_round", "run",
]
