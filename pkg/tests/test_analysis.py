import itertools
import math
from collections import Counter

import numpy as np
import pytest

from dmupf.analysis import (CapacityError, achieved_rate, budget_from_env, check_R_feasible,
                            entropy_qary, exhaustive_correctness, exhaustive_privacy,
                            inner_bounds, mutual_information, outer_bounds, rate_gap, rate_report)
from dmupf.dmuss import AccessStructure, param_sample
from dmupf.field import GF
from dmupf.pointfn import all_point_functions
from dmupf.protocol import EXHAUSTIVE, ProtocolConfig

A = AccessStructure(5, ((1, 2, 3), (3, 4, 5)))


def random_access(gen, N=None, K=None):
    N = N or int(gen.integers(2, 9))
    K = K or int(gen.integers(1, 5))
    sets = []
    for _ in range(K):
        size = int(gen.integers(1, N + 1))
        sets.append(tuple(int(x) + 1 for x in gen.choice(N, size=size, replace=False)))
    return AccessStructure(N, tuple(sets))


def direct_feasible(acc, R):
    """Independent oracle using bitmasks for the access sets."""
    masks = [sum(1 << n for n in s) for s in acc.sets]
    if any(r < 1 for r in R):
        return False
    for k, kt in itertools.permutations(range(acc.K), 2):
        if R[k] > bin(masks[k] & ~masks[kt]).count("1"):
            return False
    for sub in range(1, 1 << acc.K):
        union, total = 0, 0
        for k in range(acc.K):
            if sub >> k & 1:
                union |= masks[k]
                total += R[k]
        if total > bin(union).count("1"):
            return False
    return True


def test_entropy_examples():
    assert entropy_qary(1, 2, 1, 1) == 0
    assert math.isclose(entropy_qary(3, 7, 1, 1), math.log(3, 7) + math.log(6, 7))


def test_entropy_matches_counting():
    # empirical entropy of uniform (X, Z) is log_q of the support size
    for q, T, R in [(3, 2, 1), (3, 3, 2), (5, 2, 1)]:
        fs = all_point_functions(GF(q), T, R)
        counts = Counter((f.X, f.Z) for f in fs)
        n = len(fs)
        H = -sum(c / n * math.log(c / n, q) for c in counts.values())
        assert math.isclose(H, entropy_qary(T, q, 1, R))


def test_entropy_strictly_increasing():
    for q in (3, 7):
        vals = [entropy_qary(T, q, 1, 1) for T in range(1, 10)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        vals = [entropy_qary(4, q, 2, R) for R in range(1, 6)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_outer_bounds_examples():
    cons = outer_bounds(A)
    pairs = {(c.users[0], c.other): c.bound for c in cons if c.kind == "pair"}
    unions = {c.users: c.bound for c in cons if c.kind == "union"}
    assert pairs == {(0, 1): 2, (1, 0): 2}
    assert unions == {(0,): 3, (1,): 3, (0, 1): 5}
    single = outer_bounds(AccessStructure(1, ((1,),)))
    assert [(c.kind, c.bound) for c in single] == [("union", 1)]
    nested = outer_bounds(AccessStructure(3, ((1, 2), (1, 2, 3))))
    assert any(c.kind == "pair" and c.users == (0,) and c.bound == 0 for c in nested)
    with pytest.raises(CapacityError):
        outer_bounds(AccessStructure(21, tuple((n,) for n in range(1, 22))))


def test_inner_bounds_examples():
    inner = inner_bounds(A, 3, 7, 1)
    assert inner.maximal == [(2, 2)]
    assert (2, 2) in inner.feasible and (3, 1) not in inner.feasible
    assert len(inner.feasible) == 4
    k1 = inner_bounds(AccessStructure(3, ((1, 2, 3),)), 2, 3, 1)
    assert k1.feasible == [(1,), (2,), (3,)] and k1.maximal == [(3,)]


def test_inner_rates_approach_R_over_T():
    for m in range(1, 5):
        assert math.isclose(achieved_rate(3, 7, m, 2), 2 / 3 - rate_gap(3, 7, m, 2))
    gaps = [abs(rate_gap(3, 7, m, 2)) for m in range(1, 5)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_binary_field_gap_not_monotone():
    # at q = 2 the m = 1 term lands on R/T exactly, so |gap| first grows
    assert rate_gap(2, 2, 1, 1) == 0
    assert abs(rate_gap(2, 2, 2, 1)) > 0


def test_inner_and_outer_share_cardinalities():
    gen = np.random.default_rng(0)
    for _ in range(50):
        acc = random_access(gen)
        inner = inner_bounds(acc, 2, 3, 1)
        assert [(c.kind, c.users, c.bound) for c in inner.constraints] == \
            [(c.kind, c.users, c.bound) for c in outer_bounds(acc)]
        for R in inner.feasible:
            # dividing by T lands inside the outer region
            assert all(c.lhs([r / 2 for r in R]) <= c.bound for c in outer_bounds(acc))


def test_check_R_feasible_examples():
    assert check_R_feasible(A, (2, 2))
    bad = check_R_feasible(A, (3, 1))
    assert not bad
    assert bad.violated[0].kind == "pair" and bad.violated[0].users == (0,)
    assert "pairwise privacy bound" in bad.violations[0]
    assert not check_R_feasible(A, (0, 1))
    assert not check_R_feasible(A, (1,))


def test_check_R_feasible_matches_oracle():
    gen = np.random.default_rng(1)
    for _ in range(300):
        acc = random_access(gen)
        R = tuple(int(x) for x in gen.integers(0, 4, size=acc.K))
        assert bool(check_R_feasible(acc, R)) == direct_feasible(acc, R)


def test_adding_a_private_server_never_shrinks_region():
    gen = np.random.default_rng(2)
    for _ in range(100):
        acc = random_access(gen, N=6, K=int(gen.integers(1, 4)))
        k = int(gen.integers(0, acc.K))
        grown = list(acc.sets)
        grown[k] = grown[k] + (7,)  # server 7 is read by nobody else
        acc2 = AccessStructure(7, tuple(grown))
        before = set(inner_bounds(acc, 1, 3, 1).feasible)
        after = set(inner_bounds(acc2, 1, 3, 1).feasible)
        assert before <= after


def test_adding_a_shared_server_can_shrink_region():
    # growing A_2 over A_1 removes every positive rate for user 1
    assert check_R_feasible(AccessStructure(3, ((1, 2), (3,))), (1, 1))
    assert not check_R_feasible(AccessStructure(3, ((1, 2), (1, 2, 3))), (1, 1))


def test_rate_report():
    rep = rate_report(A, (2, 2), 3, 7, 2).to_dict()
    assert [u["M"] for u in rep["users"]] == [6, 6]
    assert all(c["verdict"] for c in rep["constraints"])
    u = rep["users"][0]
    assert math.isclose(u["gap"], rate_gap(3, 7, 2, 2))


def test_mutual_information_helper():
    assert mutual_information({(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}) == (0.0, True)
    mi, indep = mutual_information({(0, 0): 1, (1, 1): 1})
    assert not indep and math.isclose(mi, 1.0)


def test_privacy_single_user_vacuous():
    acc = AccessStructure(2, ((1, 2),))
    params = param_sample(acc, (1,), GF(3), 0)
    rep = exhaustive_privacy(params, 2)
    assert rep.pairs == [] and rep.private


def test_privacy_budget_exceeded(monkeypatch):
    params = param_sample(A, (2, 2), GF(7), 0)
    with pytest.raises(CapacityError, match="try"):
        exhaustive_privacy(params, 3, budget=1000)
    monkeypatch.setenv("DMUPF_BUDGET", "10")
    assert budget_from_env() == 10
    with pytest.raises(CapacityError):
        exhaustive_privacy(params, 1)


def test_correctness_t1_and_budget():
    acc = AccessStructure(2, ((1, 2),))
    cfg = ProtocolConfig.with_random_functions(GF(3), 1, acc, (1,), 0, EXHAUSTIVE)
    rep, _ = exhaustive_correctness(cfg)
    assert rep.correct and rep.error_probability == 0 and rep.evaluations == 1
    with pytest.raises(CapacityError):
        exhaustive_correctness(ProtocolConfig.with_random_functions(GF(7), 4, A, (1, 1), 0, EXHAUSTIVE),
                               budget=3)
