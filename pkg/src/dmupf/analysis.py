"""Rate accounting, capacity-region bounds and exhaustive verifiers.

Entropies are measured in q-ary digits so that per-server storage of ``T``
symbols of GF(q^m) is ``M = T*m`` and achieved rates are directly comparable
with ``R_k / T``.

The verifiers enumerate every secret tuple and every nullspace coefficient
and tabulate integer counts. Independence is decided on those counts with
exact integer arithmetic (``c(w,o) * total == c(w) * c(o)`` for every cell),
so a zero mutual information verdict is identically zero, never a rounded
float.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, product

from .errors import CapacityError, UsageError
from .pointfn import all_point_functions, secret_vector

DEFAULT_BUDGET = 10**8
MAX_SUBSET_USERS = 20


def budget_from_env(default=DEFAULT_BUDGET):
    raw = os.environ.get("DMUPF_BUDGET")
    return int(raw) if raw else default


# -- entropy and rates -----------------------------------------------------------

def entropy_qary(T, q, m, R):
    """Entropy of a uniform point function on ``[T]`` with ``R``-symbol range, in q-ary digits."""
    if min(T, q, m, R) < 1:
        raise UsageError("T, q, m and R must all be positive")
    return math.log(T, q) + math.log(q ** (m * R) - 1, q)


def achieved_rate(T, q, m, R):
    return entropy_qary(T, q, m, R) / (T * m)


def rate_gap(T, q, m, R):
    """``R/T`` minus the achieved rate: the exact finite-m correction term."""
    return R / T - achieved_rate(T, q, m, R)


# -- bounds ---------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """``sum_{k in users} rate_k <= bound`` (users are 0-based)."""

    kind: str  # "pair" or "union"
    users: tuple
    bound: int
    other: int | None = None  # k~ for pair constraints

    def describe(self, symbol="r"):
        if self.kind == "pair":
            k, kt = self.users[0] + 1, self.other + 1
            return f"{symbol}_{k} <= |A_{k} \\ A_{kt}| = {self.bound}"
        lhs = " + ".join(f"{symbol}_{k + 1}" for k in self.users)
        sets = " u ".join(f"A_{k + 1}" for k in self.users)
        return f"{lhs} <= |{sets}| = {self.bound}"

    def lhs(self, rates):
        return sum(rates[k] for k in self.users)

    def holds(self, rates):
        return self.lhs(rates) <= self.bound

    def to_dict(self, rates=None):
        out = {"kind": self.kind, "users": [k + 1 for k in self.users], "bound": self.bound,
               "text": self.describe()}
        if self.other is not None:
            out["other"] = self.other + 1
        if rates is not None:
            lhs = self.lhs(rates)
            out.update(lhs=lhs, slack=self.bound - lhs, verdict=lhs <= self.bound)
        return out


def _check_k(acc):
    if acc.K > MAX_SUBSET_USERS:
        raise CapacityError(f"K={acc.K} users means 2^K subset constraints; limit is {MAX_SUBSET_USERS}")


def pair_constraints(acc):
    out = []
    for k in range(acc.K):
        for kt in range(acc.K):
            if k != kt:
                diff = set(acc.sets[k]) - set(acc.sets[kt])
                out.append(Constraint("pair", (k,), len(diff), kt))
    return out


def union_constraints(acc):
    out = []
    for size in range(1, acc.K + 1):
        for S in combinations(range(acc.K), size):
            union = set().union(*(acc.sets[k] for k in S))
            out.append(Constraint("union", S, len(union)))
    return out


def outer_bounds(acc):
    """Every pairwise and every subset-union upper bound on the rate tuple."""
    _check_k(acc)
    return pair_constraints(acc) + union_constraints(acc)


@dataclass
class Feasibility:
    feasible: bool
    violations: list = field(default_factory=list)
    violated: list = field(default_factory=list)  # Constraint objects

    def __bool__(self):
        return self.feasible


def check_R_feasible(acc, R):
    """Integer block lengths against the pairwise and subset-union bounds, by full enumeration."""
    _check_k(acc)
    R = tuple(R)
    out = Feasibility(True)
    if len(R) != acc.K:
        out.feasible = False
        out.violations.append(f"expected {acc.K} rates, got {len(R)}")
        return out
    for k, r in enumerate(R):
        if r < 1:
            out.feasible = False
            out.violations.append(f"R_{k + 1} = {r} must be >= 1")
    for c in pair_constraints(acc) + union_constraints(acc):
        if not c.holds(R):
            out.feasible = False
            out.violated.append(c)
            label = "pairwise privacy bound" if c.kind == "pair" else "union decodability bound"
            out.violations.append(f"{label} violated: {c.describe('R')} (got {c.lhs(R)})")
    return out


@dataclass
class InnerRegion:
    T: int
    q: int
    m: int
    constraints: list
    feasible: list
    maximal: list

    def rates(self, R):
        return tuple(achieved_rate(self.T, self.q, self.m, r) for r in R)

    def to_dict(self):
        return {
            "T": self.T, "q": self.q, "m": self.m,
            "constraints": [c.to_dict() for c in self.constraints],
            "feasible": [list(R) for R in self.feasible],
            "maximal": [list(R) for R in self.maximal],
            "achieved_rates": {",".join(map(str, R)): list(self.rates(R)) for R in self.maximal},
        }


def inner_bounds(acc, T, q, m):
    """Integer-feasible block-length tuples, the maximal ones, and their achieved rates."""
    _check_k(acc)
    constraints = pair_constraints(acc) + union_constraints(acc)
    ranges = [range(1, len(s) + 1) for s in acc.sets]
    feasible = [R for R in product(*ranges) if all(c.holds(R) for c in constraints)]
    fs = set(feasible)
    maximal = [R for R in feasible
               if not any(R[:k] + (R[k] + 1,) + R[k + 1:] in fs for k in range(acc.K))]
    return InnerRegion(T, q, m, constraints, feasible, maximal)


@dataclass
class RateReport:
    users: list
    constraints: list

    def to_dict(self):
        return {"users": self.users, "constraints": self.constraints}


def rate_report(acc, R, T, q, m):
    M = T * m
    users, rates = [], []
    for k, r in enumerate(R):
        H = entropy_qary(T, q, m, r)
        rates.append(H / M)
        users.append({"user": k + 1, "R": r, "H": H, "M": M, "r": H / M,
                      "R_over_T": r / T, "gap": r / T - H / M})
    return RateReport(users, [c.to_dict(rates) for c in outer_bounds(acc)])


# -- exhaustive correctness ------------------------------------------------------

@dataclass
class CorrectnessReport:
    rounds: int
    evaluations: int
    failures: int

    @property
    def error_probability(self):
        return Fraction(self.failures, self.evaluations) if self.evaluations else Fraction(0)

    @property
    def correct(self):
        return self.failures == 0

    def to_dict(self):
        return {"rounds": self.rounds, "evaluations": self.evaluations,
                "failures": self.failures, "P_e": str(self.error_probability),
                "correct": self.correct}


def exhaustive_correctness(cfg, budget=None, params=None, stores=None, peeling=False):
    """Run every demand vector in ``[T]^K`` against one placement and count wrong outputs."""
    from .protocol import EXHAUSTIVE, run

    budget = budget_from_env() if budget is None else budget
    rounds = cfg.T ** cfg.acc.K
    if rounds > budget:
        raise CapacityError(f"{rounds} demand vectors exceed the budget {budget}")
    tr = run(replace(cfg, demands=EXHAUSTIVE), peeling=peeling, params=params, stores=stores)
    evals = [u for r in tr.rounds for u in r["users"]]
    report = CorrectnessReport(len(tr.rounds), len(evals), sum(not u["correct"] for u in evals))
    return report, tr


# -- exhaustive privacy ---------------------------------------------------------

@dataclass
class PairPrivacy:
    k: int
    observer: int
    mi_bits: float
    independent: bool
    secrets: int
    observations: int
    states: int
    mi_responses_bits: float
    responses_independent: bool

    def to_dict(self):
        return {
            "user": self.k + 1, "observer": self.observer + 1,
            "mi": "0" if self.independent else repr(self.mi_bits),
            "mi_bits": 0.0 if self.independent else self.mi_bits,
            "verdict": "zero" if self.independent else "nonzero",
            "secret_support": self.secrets, "observation_support": self.observations,
            "states": self.states,
            "mi_responses": "0" if self.responses_independent else repr(self.mi_responses_bits),
        }


@dataclass
class PrivacyReport:
    pairs: list

    @property
    def private(self):
        return all(p.independent for p in self.pairs)

    def to_dict(self):
        return {"pairs": [p.to_dict() for p in self.pairs], "private": self.private}


def _independent(joint, total):
    """Exact factorization test on integer counts."""
    cw, co = Counter(), Counter()
    for (w, o), c in joint.items():
        cw[w] += c
        co[o] += c
    # marginal counts are positive, so a missing cell already breaks independence
    cells = sum(1 for c in joint.values() if c)
    if cells != len(cw) * len(co):
        return False, cw, co
    for (w, o), c in joint.items():
        if c * total != cw[w] * co[o]:
            return False, cw, co
    return True, cw, co


def mutual_information(joint):
    """``(mi_bits, independent)`` for a joint count table ``{(w, o): count}``."""
    total = sum(joint.values())
    indep, cw, co = _independent(joint, total)
    if indep:
        return 0.0, True
    mi = math.fsum(c / total * math.log2(c * total / (cw[w] * co[o]))
                   for (w, o), c in joint.items() if c)
    return mi, False


def privacy_states(params, T):
    """Size of the enumeration: secret tuples x nullspace draws x unread-server fill."""
    ctx = params.ctx
    secrets = 1
    for r in params.R:
        secrets *= T * (ctx.order ** r - 1)
    fill = params.acc.N - len(params.acc.union)
    return secrets * ctx.order ** (T * params.nullspace.cols) * ctx.order ** (T * fill)


def _suggest(params, T, budget):
    for t in range(T - 1, 0, -1):
        if privacy_states(params, t) <= budget:
            return f"T <= {t}"
    return "a smaller field or fewer users"


def exhaustive_privacy(params, T, budget=None):
    """Exact ``I(W_k; G_{A_k~})`` for every ordered pair of distinct users.

    Every user's point function ranges uniformly over ``[T] x (F^{R_k} \\ 0)``
    and every coordinate's nullspace coefficient over ``F^nullity``. Servers
    outside every access set are never observed, so their fill only scales
    all counts and is not enumerated. Also reports, informationally, the
    mutual information between ``W_k`` and every response user ``k~`` could
    receive over all of its possible demands.
    """
    budget = budget_from_env() if budget is None else budget
    states = privacy_states(params, T)
    if states > budget:
        raise CapacityError(f"{states} enumeration states exceed the budget {budget}; "
                            f"try {_suggest(params, T, budget)}")
    ctx, acc = params.ctx, params.acc
    funcs = [all_point_functions(ctx, T, r) for r in params.R]
    vectors = [[secret_vector(f) for f in fs] for fs in funcs]
    P, Nns = params.particular, params.nullspace
    nus = list(product(ctx.elements(), repeat=Nns.cols))
    pairs = []
    for kt in range(acc.K):
        others = [k for k in range(acc.K) if k != kt]
        if not others:
            continue
        rows = params.observer_rows(kt)
        selP, selN = P.select_rows(rows), Nns.select_rows(rows)
        image = Counter(selN.apply(nu) if Nns.cols else (0,) * len(rows) for nu in nus)
        joints = {k: Counter() for k in others}
        cache = {}
        for choice in product(*(range(len(v)) for v in vectors)):
            per_coord = []
            for t in range(T):
                s = params.stack([vectors[k][choice[k]][t] for k in range(acc.K)])
                items = cache.get(s)
                if items is None:
                    b = selP.apply(s)
                    items = [(tuple(ctx.add(x, y) for x, y in zip(b, v)), c) for v, c in image.items()]
                    cache[s] = items
                per_coord.append(items)
            for combo in product(*per_coord):
                obs = tuple(o for o, _ in combo)
                mult = math.prod(c for _, c in combo)
                for k in others:
                    joints[k][(choice[k], obs)] += mult
        responses = _response_map(params, kt, T)
        seen = {}
        for k in others:
            joint = joints[k]
            mi, indep = mutual_information(joint)
            rjoint = Counter()
            for (w, obs), c in joint.items():
                r = seen.get(obs)
                if r is None:
                    r = seen[obs] = responses(obs)
                rjoint[(w, r)] += c
            rmi, rindep = mutual_information(rjoint)
            pairs.append(PairPrivacy(
                k, kt, mi, indep, len(vectors[k]), len({o for _, o in joint}),
                states, rmi, rindep))
    pairs.sort(key=lambda p: (p.k, p.observer))
    return PrivacyReport(pairs)


def _response_map(params, kt, T):
    """Observation of ``G_{A_kt}`` -> all responses user ``kt`` could get, over every demand."""
    ctx = params.ctx
    Ik = params.vandermonde_inverses[kt]
    coef = []
    for i in range(len(params.acc.sets[kt])):
        a = ctx.neg(params.alpha[kt][i])
        coef.append([ctx.mul(a, Ik[j, i]) for j in range(params.R[kt])])

    def responses(obs):
        return tuple(ctx.mul(c, obs[V][i])
                     for V in range(T) for i in range(len(coef)) for c in coef[i])
    return responses
