from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcbp.lp import BranchState, ColumnPool, DualVector, RmpColumn, reduced_cost, solve_rmp
from mcbp.model import SCALE, Route

N = 4
SINK = N + 1
ART = 10_000 * SCALE


def col(visits, cost):
    return RmpColumn.from_route(Route(tuple(visits), cost=cost * SCALE), SINK)


def _solve_lin(a, b):
    """Gauss-Jordan over the rationals; None when singular."""
    m = len(a)
    aug = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for c in range(m):
        p = next((r for r in range(c, m) if aug[r][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        for r in range(m):
            if r != c and aug[r][c] != 0:
                f = aug[r][c] / aug[c][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[i][m] / aug[i][i] for i in range(m)]


def dual_vertex_optimum(cols, art, n=N):
    """Covering LP value via exact enumeration of the dual polytope's vertices.

    Dual: max sum(pi) s.t. pi(route) <= cost for every column, 0 <= pi <= art
    (no upper bound when ``art`` is None).
    """
    cons = []
    for c in cols:
        cons.append(([Fraction(1 if v in c.route.visits else 0) for v in range(1, n + 1)],
                     Fraction(c.cost, SCALE)))
    for i in range(n):
        e = [Fraction(int(i == k)) for k in range(n)]
        if art is not None:
            cons.append((e, Fraction(art, SCALE)))
        cons.append(([-x for x in e], Fraction(0)))
    best = None
    for pick in itertools.combinations(cons, n):
        pi = _solve_lin([p[0] for p in pick], [p[1] for p in pick])
        if pi is None:
            continue
        if all(sum(a * x for a, x in zip(row, pi)) <= rhs for row, rhs in cons):
            val = sum(pi)
            best = val if best is None or val > best else best
    return best


def random_pool(rng, k):
    out = []
    for _ in range(k):
        size = rng.randint(1, N)
        out.append(col(sorted(rng.sample(range(1, N + 1), size)), rng.randint(1, 60)))
    return out


def test_singleton_pool():
    pool = [col([v], 10 * v) for v in range(1, N + 1)]
    res = solve_rmp(pool, N)
    assert res.objective == pytest.approx(100 * SCALE)
    assert np.allclose(res.values, 1.0)
    assert res.artificial_level == pytest.approx(0.0)


def test_cheaper_cover_is_taken():
    pool = [col([v], 30) for v in range(1, N + 1)] + [col([1, 2, 3, 4], 50)]
    res = solve_rmp(pool, N)
    assert res.objective == pytest.approx(50 * SCALE)
    assert res.values[-1] == pytest.approx(1.0)


def test_uncovered_client_uses_artificial():
    res = solve_rmp([col([1, 2, 3], 5)], N, art_cost=ART)
    assert res.artificial[3] == pytest.approx(1.0)
    assert res.artificial_level >= 1.0 - 1e-9


@pytest.mark.parametrize("method", ["simplex", "ipm"])
def test_random_pools_match_exact_dual_enumeration(method):
    rng = random.Random(7)
    for _ in range(40):
        pool = random_pool(rng, rng.randint(1, 8))
        res = solve_rmp(pool, N, art_cost=ART, method=method)
        exact = dual_vertex_optimum(pool, ART)
        assert res.objective / SCALE == pytest.approx(float(exact), rel=1e-7, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["simplex", "ipm"]))
def test_duals_are_feasible_and_tight(seed, method):
    rng = random.Random(seed)
    pool = random_pool(rng, rng.randint(1, 10))
    res = solve_rmp(pool, N, art_cost=ART, method=method)
    d = res.duals
    assert all(p >= -1e-6 * SCALE for p in d.pi)
    for c in pool:
        assert reduced_cost(c, d) >= -1e-5 * SCALE
    # strong duality for the covering LP
    assert sum(d.pi) == pytest.approx(res.objective, rel=1e-6, abs=1e-3)
    # weak duality against any integer cover: singleton artificials
    assert res.objective <= N * ART + 1e-6


def test_partitioning_is_never_cheaper_than_covering():
    rng = random.Random(3)
    for _ in range(30):
        pool = random_pool(rng, 6)
        cov = solve_rmp(pool, N, covering=True, art_cost=ART)
        part = solve_rmp(pool, N, covering=False, art_cost=ART)
        assert cov.objective <= part.objective + 1e-6


def test_active_rows_zero_out_other_duals():
    pool = [col([1], 10), col([2], 20), col([1, 3], 5)]
    res = solve_rmp(pool, N, active=(1 << 1) | (1 << 2))
    assert res.duals.pi[2] == 0.0 and res.duals.pi[3] == 0.0
    assert len(res.columns) == 2
    assert res.objective == pytest.approx(30 * SCALE)


def test_vehicle_row_bounds_route_count():
    pool = [col([v], 10) for v in range(1, N + 1)] + [col([1, 2], 25), col([3, 4], 25)]
    free = solve_rmp(pool, N)
    assert free.vehicles == pytest.approx(4.0)
    capped = solve_rmp(pool, N, vehicles=(None, 2))
    assert capped.vehicles <= 2 + 1e-9
    assert capped.objective == pytest.approx(50 * SCALE)
    # the cap is priced through the vehicle dual
    assert capped.duals.vehicle < 0
    assert sum(capped.duals.pi) + 2 * capped.duals.vehicle == pytest.approx(capped.objective, rel=1e-9)
    low = solve_rmp([col([1, 2, 3, 4], 10), col([1], 50), col([2, 3, 4], 50)], N, vehicles=(2, None))
    assert low.vehicles >= 2 - 1e-9 and low.vehicle_artificial == pytest.approx(0.0)


def test_vehicle_lower_bound_without_columns_buys_artificial():
    # covering rows would let the single column take value 2
    res = solve_rmp([col([1, 2, 3, 4], 10)], N, covering=False, art_cost=ART, vehicles=(2, None))
    assert res.vehicle_artificial == pytest.approx(1.0)
    assert solve_rmp([col([1, 2, 3, 4], 10)], N, art_cost=ART, vehicles=(2, None)).vehicles == pytest.approx(2.0)


def test_pool_deduplicates_and_keeps_loaded_copy():
    pool = ColumnPool(SINK)
    assert pool.add(Route((1, 2), cost=5))
    assert not pool.add(Route((1, 2), cost=5, loading=(0, 0)))
    assert len(pool) == 1 and pool.get((1, 2)).route.loading == (0, 0)
    assert pool.add(Route((2, 1), cost=5))
    assert (2, 1) in pool


def test_pool_filter_by_branch_and_active_set():
    pool = ColumnPool(SINK, [col([1, 2], 1), col([2, 1], 1), col([3], 1), col([1, 3], 1)])
    keys = lambda b, a=None: {c.key for c in pool.filtered(b, a)}
    assert keys(BranchState().forbid((1, 2))) == {(2, 1), (3,), (1, 3)}
    # forcing (1,2): 1 must be followed by 2 and 2 preceded by 1 wherever they appear
    assert keys(BranchState().force((1, 2))) == {(1, 2), (3,)}
    # forcing an arc out of the origin
    assert keys(BranchState().force((0, 3))) == {(1, 2), (2, 1), (3,)}
    assert keys(BranchState(), (1 << 1) | (1 << 2)) == {(1, 2), (2, 1)}


def test_branch_state_vehicle_bounds_tighten():
    b = BranchState().vehicles_at_most(5).vehicles_at_most(7).vehicles_at_least(2).vehicles_at_least(1)
    assert (b.min_vehicles, b.max_vehicles) == (2, 5) and b.vehicle_row
    assert not BranchState().vehicle_row


def test_reduced_cost_and_dual_blend():
    d = DualVector((1.0, 2.0, 3.0, 4.0), vehicle=-5.0)
    assert reduced_cost(col([1, 3], 10), d) == 10 * SCALE - 4.0 + 5.0
    mid = d.blend(DualVector.zeros(N), 0.5)
    assert mid.pi == (0.5, 1.0, 1.5, 2.0) and mid.vehicle == -2.5
    assert d.padded() == [-5.0, 1.0, 2.0, 3.0, 4.0, 0.0]
    with pytest.raises(ValueError):
        reduced_cost(col([1], 1), DualVector((1.0,) * 0))


def test_reduced_cost_examples():
    assert reduced_cost(col([1, 2], 7), DualVector.zeros(N)) == 7 * SCALE
    assert reduced_cost(col([1, 2], 10), DualVector((4000.0, 7000.0, 0.0, 0.0))) == -1000.0


@settings(max_examples=50, deadline=None)
@given(st.permutations([1, 2, 3, 4]), st.integers(1, 4),
       st.lists(st.floats(0, 100), min_size=N, max_size=N), st.integers(1, 500))
def test_reduced_cost_is_arc_sum(perm, k, pis, cost):
    visits = perm[:k]
    d = DualVector(tuple(pis))
    c = col(visits, cost)
    pad = d.padded()
    path = (0, *visits, SINK)
    # arc costs are arbitrary as long as they add up to the column cost
    arc_cost = {a: (cost * SCALE if a == (0, visits[0]) else 0) for a in zip(path, path[1:])}
    arcwise = sum(arc_cost[(i, j)] - pad[i] for i, j in zip(path, path[1:]))
    assert reduced_cost(c, d) == pytest.approx(arcwise)


def test_singleton_duals_equal_singleton_costs():
    pool = [col([v], 10 * v) for v in range(1, N + 1)]
    res = solve_rmp(pool, N, method="simplex")
    assert res.duals.pi == pytest.approx([10.0 * v * SCALE for v in range(1, N + 1)])


def test_six_client_pools_match_exact_vertex_enumeration():
    rng = random.Random(11)
    n = 6
    for _ in range(3):
        # singletons keep the artificials out of the optimum, so their bounds are omitted
        pool = [RmpColumn.from_route(Route((v,), cost=rng.randint(20, 60) * SCALE), n + 1) for v in range(1, n + 1)]
        pool += [RmpColumn.from_route(Route(tuple(sorted(rng.sample(range(1, n + 1), rng.randint(2, 5)))),
                                            cost=rng.randint(20, 90) * SCALE), n + 1) for _ in range(4)]
        res = solve_rmp(pool, n, art_cost=ART, method="simplex")
        exact = dual_vertex_optimum(pool, None, n)
        assert res.objective / SCALE == pytest.approx(float(exact), rel=1e-9)
