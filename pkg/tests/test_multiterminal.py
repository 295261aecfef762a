"""Networks, cut-set LPs, reference schemes, and schedule serialization."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ifcomp.info_core import (
    DomainError,
    FunctionTable,
    JointPmf,
    binary_entropy,
    dsbs,
)
from ifcomp.multiterminal import (
    LPProblem,
    NetworkSpec,
    build_cutset_lp,
    concurrent_to_alternating,
    cut_entropy_bound,
    merge_schedule_rates,
    modulo_sum_rates,
    relay_rates,
    solve_lp,
    solve_lp_by_vertices,
    star_and_rates,
    star_and_total,
    star_fair_bit_limit,
    validate_alternating_schedule,
)


def xor_network(p):
    joint = JointPmf((2, 2, 1), dsbs(p).table.reshape(-1))
    f = FunctionTable((2, 2, 1), 2, [0, 1, 1, 0])
    return NetworkSpec(joint, [(0, 2), (1, 2)], [None, None, f])


def test_cut_entropy_bounds_on_xor():
    net = xor_network(0.25)
    h = binary_entropy(0.25)
    assert cut_entropy_bound(net, [0]) == pytest.approx(h, abs=1e-12)
    assert cut_entropy_bound(net, [1]) == pytest.approx(h, abs=1e-12)
    # both sources behind the cut: the sink knows nothing, needs H(xor)
    assert cut_entropy_bound(net, [0, 1]) == pytest.approx(h, abs=1e-12)


def test_xor_lp_value_and_tightness():
    for p in (0.1, 0.25, 0.4):
        net = xor_network(p)
        lp = build_cutset_lp(net)
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        assert sol.optimum == pytest.approx(2 * binary_entropy(p), abs=1e-9)
        scheme = modulo_sum_rates(p)
        assert sum(scheme.values()) == pytest.approx(sol.optimum, abs=1e-9)
        # the LP solution satisfies every cut constraint
        x = np.asarray(sol.x)
        assert np.all(lp.A @ x >= np.asarray(lp.b) - 1e-9)


def test_extra_cut_bounds_tighten_the_lp():
    net = xor_network(0.25)
    base = solve_lp(build_cutset_lp(net)).optimum
    lifted = solve_lp(build_cutset_lp(
        net, extra_cut_bounds=[([0], 1.5)])).optimum
    assert lifted == pytest.approx(1.5 + binary_entropy(0.25), abs=1e-9)
    assert lifted > base


def test_lp_infeasible_and_unbounded_detected():
    # x1 >= 1 with x1 <= 0.5 stated as -x1 >= -0.5 is infeasible
    lp = LPProblem(np.array([1.0]), np.array([[1.0], [-1.0]]),
                   np.array([1.0, -0.5]), ["x1"])
    assert solve_lp(lp).status == "infeasible"
    # minimizing -x1 with only a lower bound runs away
    lp2 = LPProblem(np.array([-1.0]), np.array([[1.0]]), np.array([1.0]),
                    ["x1"])
    assert solve_lp(lp2).status == "unbounded"


def test_relay_crossover():
    f_and = FunctionTable((2, 2), 2, [0, 0, 0, 1])
    # below the crossover the forwarded description is cheaper than the
    # answer; above it the order flips
    for p, expect_first_larger in ((0.2, False), (0.45, True)):
        pair = dsbs(p)
        rates = relay_rates(pair, f_and)
        first, second = rates[(0, 1)], rates[(1, 2)]
        assert (first > second) == expect_first_larger
    rates = relay_rates(dsbs(1.0 / 3.0), f_and)
    assert rates[(0, 1)] == pytest.approx(rates[(1, 2)], abs=1e-9)
    assert rates[(0, 1)] == pytest.approx(binary_entropy(1.0 / 3.0), abs=1e-9)


def test_star_rates_and_limit():
    rates = star_and_rates([0.5, 0.5, 0.5])
    assert len(rates) == 4  # two messages per hop after the first terminal
    assert all(r >= 0 for r in rates)
    total = star_and_total([0.5] * 3)
    assert total == pytest.approx(2.561278124459133, abs=1e-9)
    assert star_and_total([0.5] * 6) == pytest.approx(
        3.861504958588458, abs=1e-9)
    assert star_and_total([0.5] * 64) == pytest.approx(
        4.156353308981313, abs=1e-9)
    assert star_fair_bit_limit() == pytest.approx(
        3 + np.log2(np.e), abs=1e-12)
    last = 0.0
    for m in range(3, 40):
        tot = star_and_total([0.5] * m)
        assert tot < star_fair_bit_limit()
        assert tot >= last - 1e-12
        last = tot


def test_schedule_serialization():
    for t in (1, 2, 3, 5, 8):
        messages = concurrent_to_alternating(t)
        assert len(messages) == t + 1
        validate_alternating_schedule(messages, t)
        senders = [m[0] for m in messages]
        assert senders == ["A" if i % 2 == 0 else "B"
                           for i in range(len(messages))]
    with pytest.raises(DomainError):
        validate_alternating_schedule(
            [("B", (("B", 1),)), ("A", (("A", 1),))], 1)


def test_schedule_rate_merge_preserves_total():
    t = 4
    messages = concurrent_to_alternating(t)
    ra = [0.5, 0.25, 0.125, 0.0625]
    rb = [0.3, 0.2, 0.1, 0.05]
    merged = merge_schedule_rates(messages, ra, rb)
    assert len(merged) == t + 1
    assert sum(merged) == pytest.approx(sum(ra) + sum(rb), abs=1e-12)
    # the opening message carries only round-1 traffic from A
    assert merged[0] == pytest.approx(ra[0], abs=1e-12)


# -- property tests -----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_simplex_agrees_with_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(2, 5), rng.integers(2, 6)
    A = rng.uniform(-1, 2, size=(m, n))
    b = rng.uniform(-1, 1, size=m)
    c = rng.uniform(0.1, 2, size=n)
    lp = LPProblem(c, A, b, ["x%d" % j for j in range(n)])
    got = solve_lp(lp)
    want = solve_lp_by_vertices(lp)
    assert got.status == want.status
    if got.status == "optimal":
        assert got.optimum == pytest.approx(want.optimum, abs=1e-7)
        x = np.asarray(got.x)
        assert np.all(x >= -1e-9)
        assert np.all(A @ x >= b - 1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.45), st.integers(1, 6))
def test_lp_solution_satisfies_all_cuts(p, extra_nodes):
    net = xor_network(p)
    sol = solve_lp(build_cutset_lp(net))
    for cut in ([0], [1], [0, 1]):
        outgoing = [i for i, (j, k) in enumerate(net.edges)
                    if j in cut and k not in cut]
        got = sum(sol.x[i] for i in outgoing)
        assert got >= cut_entropy_bound(net, cut) - 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10))
def test_schedule_always_validates(t):
    messages = concurrent_to_alternating(t)
    payloads = [p for _, ps in messages for p in ps]
    assert len(payloads) == 2 * t
    assert len(set(payloads)) == 2 * t
