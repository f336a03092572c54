from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import make_instance, small
from mcbp.compartment import find_loading
from mcbp.lp import BranchState, DualVector, reduced_cost
from mcbp.model import SCALE, route_cost, to_fixed, validate_route
from mcbp.oracle import enumerate_routes
from mcbp.pricing import (
    Epsilons,
    ExtensionChoice,
    Infeasible,
    Label,
    arc_filter,
    build_pricing_graph,
    dominates_aggressive,
    dominates_aggressive_inter_day,
    dominates_inter_day,
    dominates_same_day,
    enumerate_extensions,
    extend,
    initial_label,
    solve_pricing,
)

INF = float("inf")


def _random_case(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 7)
    inst = small(seed, n=n, compartments=rng.choice([2, 4]), windows_per_day=rng.choice([1, 2]))
    duals = DualVector(tuple(rng.uniform(0, inst.vehicle.fixed_cost) for _ in range(n)))
    return inst, duals


def _min_rc(inst, duals, **kw):
    st = {}
    out = solve_pricing(build_pricing_graph(inst, duals, kw.pop("branching", None)), inst, "exact",
                        limit=10**6, threshold=INF, stats=st, **kw)
    return st, out


def test_extend_waits_for_window():
    inst = make_instance([(0, 0), (2, 0)], [10], [[(5, 9, 0)]])
    lab = initial_label(inst)
    choices = enumerate_extensions(inst, lab, 1)
    assert ExtensionChoice(0, 0, 0) in choices
    nxt = extend(inst, lab, 1, ExtensionChoice(0, 0, 0))
    assert (nxt.time, nxt.day, nxt.work) == (to_fixed(5), 0, to_fixed(2))
    assert nxt.cost == inst.vehicle.fixed_cost + to_fixed(2)
    # a break needs a second day
    assert extend(inst, lab, 1, ExtensionChoice(1, 0, 0)) == Infeasible("horizon")
    assert extend(inst, nxt, 1, ExtensionChoice(0, 0, 0)) == Infeasible("elementarity")


def test_extend_reports_closed_window_and_capacity():
    inst = make_instance([(0, 0), (8, 0), (1, 0)], [10, 95], [[(0, 4, 0)], [(0, 24, 0)]])
    lab = initial_label(inst)
    assert extend(inst, lab, 1, ExtensionChoice(0, 0, 0)) == Infeasible("time window")
    inst2 = make_instance([(0, 0), (1, 0), (1, 1)], [10, 95], [[(0, 24, 0)], [(0, 24, 0)]])
    at2 = extend(inst2, initial_label(inst2), 2, ExtensionChoice(0, 0, 0))
    assert extend(inst2, at2, 1, ExtensionChoice(0, 0, 0)) == Infeasible("compartment capacity")


def test_break_resets_daily_counters():
    inst = make_instance([(0, 0), (2, 0)], [10], [[(0, 24, 1)]], horizon=2)
    nxt = extend(inst, initial_label(inst), 1, ExtensionChoice(1, 0, 0))
    assert nxt.day == 1 and nxt.time == to_fixed(12)
    # at most the leg driven after the break counts towards the new day
    assert nxt.work <= to_fixed(2) and nxt.drive <= to_fixed(2)


def test_reduced_arc_cost_subtracts_tail_dual():
    inst = make_instance([(0, 0), (1, 0), (2, 0)], [10, 10], [[(0, 24, 0)], [(0, 24, 0)]])
    g = build_pricing_graph(inst, DualVector((5.0 * SCALE, 0.0)))
    assert g.rcost[(1, 2)] == inst.cost[1][2] - 5 * SCALE
    assert g.rcost[(0, 1)] == inst.cost[0][1]
    assert g.rcost[(2, 1)] == inst.cost[2][1]


@pytest.mark.parametrize("loading,count", [("set", 40), ("track", 15)])
def test_min_reduced_cost_matches_enumeration(loading, count):
    for seed in range(count):
        inst, duals = _random_case(seed)
        expect = min(reduced_cost(r, duals) for r in enumerate_routes(inst))
        labels = []
        for kw in ({}, dict(inter_day=False), dict(inter_day=False, same_day=False)):
            st, out = _min_rc(inst, duals, loading=loading, **kw)
            assert st["min_rcost"] == pytest.approx(expect, abs=1e-6)
            labels.append(st["labels"])
            for r in out:
                r = r if r.loading is not None else r.with_loading(find_loading(inst, r.visits))
                assert validate_route(inst, r) is None
                assert reduced_cost(r, duals) == pytest.approx(r.rcost, abs=1e-6)
        # more dominance never creates labels
        assert labels[0] <= labels[1] <= labels[2]


def test_forced_depot_arc_restricts_first_visit():
    for seed in range(10):
        inst, duals = _random_case(seed)
        b = BranchState().force((0, 3))
        allowed = [r for r in enumerate_routes(inst) if 3 not in r.visits or r.visits[0] == 3]
        st, out = _min_rc(inst, duals, branching=b, loading="set")
        assert st["min_rcost"] == pytest.approx(min(reduced_cost(r, duals) for r in allowed), abs=1e-6)
        assert all(3 not in r.visits or r.visits[0] == 3 for r in out)


def test_forbidden_arc_never_used():
    for seed in range(10):
        inst, duals = _random_case(seed)
        b = BranchState().forbid((1, 2)).forbid((2, inst.sink))
        _, out = _min_rc(inst, duals, branching=b, loading="set")
        for r in out:
            path = (0, *r.visits, inst.sink)
            assert not {(1, 2), (2, inst.sink)} & set(zip(path, path[1:]))


def test_contradictory_forced_arcs_make_graph_infeasible():
    inst, duals = _random_case(1)
    g = build_pricing_graph(inst, duals, BranchState().force((1, 2)).force((1, 3)))
    assert g.infeasible
    assert solve_pricing(g, inst) == []
    cyc = build_pricing_graph(inst, duals, BranchState().force((1, 2)).force((2, 1)))
    assert cyc.infeasible


def test_dominant_dual_gives_singleton():
    for seed in range(8):
        inst, _ = _random_case(seed)
        big = 1e4 * inst.vehicle.fixed_cost
        duals = DualVector((big,) + (0.0,) * (inst.n - 1))
        single = [r for r in enumerate_routes(inst) if r.visits == (1,)]
        st, out = _min_rc(inst, duals, loading="set")
        if single:
            assert st["min_rcost"] == pytest.approx(route_cost(inst, [1]) - big, abs=1e-6)
        assert 1 in out[0].visits


def test_relaxed_pricing_is_a_lower_bound():
    for seed in range(15):
        inst, duals = _random_case(seed)
        exact, _ = _min_rc(inst, duals, loading="set")
        st = {}
        solve_pricing(build_pricing_graph(inst, duals), inst, "relaxed_compartments", limit=10**6,
                      threshold=INF, stats=st)
        assert st["min_rcost"] <= exact["min_rcost"] + 1e-6


def test_aggressive_routes_are_feasible_and_negative():
    for seed in range(10):
        inst, duals = _random_case(seed)
        for r in solve_pricing(build_pricing_graph(inst, duals), inst, "aggressive", limit=50):
            assert r.rcost < 0
            assert len(set(r.visits)) == len(r.visits)
            assert validate_route(inst, r) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_arc_filter_keeps_every_feasible_route(seed):
    inst, duals = _random_case(seed % 200)
    g = arc_filter(inst, build_pricing_graph(inst, duals))
    for r in enumerate_routes(inst):
        path = (0, *r.visits, inst.sink)
        assert set(zip(path, path[1:])) <= g.enabled


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_returned_routes_are_elementary_and_sorted(seed):
    inst, duals = _random_case(seed % 200)
    out = solve_pricing(build_pricing_graph(inst, duals), inst, "exact", limit=20, loading="set")
    rcs = [r.rcost for r in out]
    assert rcs == sorted(rcs)
    assert len({r.incidence for r in out}) == len(out)
    for r in out:
        assert len(set(r.visits)) == len(r.visits)


def test_unknown_modes_are_rejected():
    inst, duals = _random_case(0)
    g = build_pricing_graph(inst, duals)
    with pytest.raises(ValueError):
        solve_pricing(g, inst, "bogus")
    with pytest.raises(ValueError):
        solve_pricing(g, inst, loading="bogus")
    with pytest.raises(ValueError):
        build_pricing_graph(inst, DualVector.zeros(inst.n + 1))


def test_zero_duals_leave_arc_costs_and_price_nothing():
    for seed in range(5):
        inst, _ = _random_case(seed)
        g = build_pricing_graph(inst, DualVector.zeros(inst.n))
        assert all(rc == inst.cost[i][j] for (i, j), rc in g.rcost.items())
        assert solve_pricing(g, inst, loading="set") == []


def test_closed_window_only_is_infeasible():
    inst = make_instance([(0, 0), (2, 0)], [10], [[(0, 1, 0)]])
    assert extend(inst, initial_label(inst), 1, ExtensionChoice(0, 0, 0)) == Infeasible("time window")


def test_break_extension_formula():
    inst = make_instance([(0, 0), (2, 0), (3, 0)], [10, 10], [[(0, 24, 0)], [(20, 40, 1)]],
                         service=1, horizon=2)
    at1 = extend(inst, initial_label(inst), 1, ExtensionChoice(0, 0, 0))
    nxt = extend(inst, at1, 2, ExtensionChoice(1, 0, 0))
    # t = max(t + t_ij + u_i + B, s) with the counters reset
    assert nxt.time == max(at1.time + to_fixed(1) + to_fixed(1) + to_fixed(10), to_fixed(20))
    assert (nxt.work, nxt.drive, nxt.day) == (0, 0, at1.day + 1)


def test_single_choice_without_options():
    inst = make_instance([(0, 0), (2, 0)], [10], [[(0, 24, 0)]])
    assert enumerate_extensions(inst, initial_label(inst), 1) == [ExtensionChoice(0, 0, 0)]


def test_identical_empty_compartments_are_tried_once():
    inst = make_instance([(0, 0), (2, 0)], [10], [[(0, 24, 0)]], n_compartments=2, comp_capacity=50)
    assert [c.compartment for c in enumerate_extensions(inst, initial_label(inst), 1)] == [0]


def test_late_label_gets_both_break_choices():
    # arrival 8 misses the morning window; a break (arrival 18) also misses the evening one
    inst = make_instance([(0, 0), (8, 0)], [10], [[(5, 7, 0), (17, 17.5, 0), (26, 28, 1)]], horizon=2)
    got = {(c.take_break, c.window_index) for c in enumerate_extensions(inst, initial_label(inst), 1)}
    assert got == {(0, 1), (1, 2)}
    today = extend(inst, initial_label(inst), 1, ExtensionChoice(0, 1, 0))
    tomorrow = extend(inst, initial_label(inst), 1, ExtensionChoice(1, 2, 0))
    assert (today.day, today.time) == (0, to_fixed(17))
    assert (tomorrow.day, tomorrow.time) == (1, to_fixed(26))


def _label(**kw):
    base = dict(node=1, time=5000, cost=100.0, day=0, visited=0b10, loads=(10,), members=(0b10,),
                work=3000, drive=2000, total=3000)
    base.update(kw)
    return Label(**base)


def test_dominance_examples():
    a = _label()
    assert dominates_same_day(a, a)
    assert not dominates_same_day(a, _label(day=1))
    B = 10_000
    assert dominates_inter_day(_label(time=20_000 - B, day=0), _label(time=20_000, day=1), B)
    assert not dominates_inter_day(_label(time=20_000 - B + 1, day=0), _label(time=20_000, day=1), B)
    eps = Epsilons(cost=4.0)
    assert dominates_aggressive(_label(cost=102.0), _label(cost=100.0), eps)
    assert not dominates_aggressive(_label(cost=105.0), _label(cost=100.0), eps)


labels = st.builds(
    _label,
    time=st.integers(0, 9), cost=st.integers(0, 9), day=st.integers(0, 1), visited=st.integers(0, 7),
    loads=st.tuples(st.integers(0, 9)), members=st.tuples(st.integers(0, 7)), work=st.integers(0, 9),
    drive=st.integers(0, 9), total=st.integers(0, 9),
)


@settings(max_examples=300, deadline=None)
@given(labels, labels)
def test_zero_epsilon_aggressive_is_exact(a, b):
    assert dominates_aggressive(a, b, Epsilons()) == dominates_same_day(a, b)
    assert dominates_aggressive_inter_day(a, b, 3, Epsilons()) == dominates_inter_day(a, b, 3)


def test_aggressive_never_beats_exact():
    for seed in range(15):
        inst, duals = _random_case(seed)
        exact, _ = _min_rc(inst, duals, loading="set")
        out = solve_pricing(build_pricing_graph(inst, duals), inst, "aggressive", limit=10**6,
                            threshold=INF, eps=Epsilons.default_for(inst, 0.2))
        assert min(r.rcost for r in out) >= exact["min_rcost"] - 1e-6


def test_arc_filter_examples():
    heavy = make_instance([(0, 0), (1, 0), (2, 0)], [60, 50], [[(0, 24, 0)], [(0, 24, 0)]])
    g = arc_filter(heavy, build_pricing_graph(heavy, DualVector.zeros(2)))
    assert (1, 2) not in g.enabled and (2, 1) not in g.enabled and (0, 1) in g.enabled
    apart = make_instance([(0, 0), (1, 0), (2, 0)], [10, 10], [[(0, 24, 0)], [(0, 24, 0)]],
                          item_item=[(1, 0), (0, 1)])
    g = arc_filter(apart, build_pricing_graph(apart, DualVector.zeros(2)))
    assert (1, 2) not in g.enabled and (2, 1) not in g.enabled
