import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from mia_routing.formulation import ConstraintSet
from mia_routing.io import emit_network, parse_network
from mia_routing.network import (FileSpec, NetworkParams, Traffic, generate_random_network,
                                 spectral_efficiency)
from mia_routing.optimizer import OptimizeConfig, initial_order, optimize
from mia_routing.order import apply_swap, check_swap, init_single_packet_order
from mia_routing.simplex import Status, constraint_residuals, from_dense, solve_lp
from mia_routing.validator import replay

pos = st.floats(0.01, 100, allow_nan=False)
seeds = st.integers(0, 2**31 - 1)


@given(pos, pos, pos, st.floats(1.01, 3))
def test_spectral_efficiency_monotone(h, P, N0, k):
    base = spectral_efficiency(h, P, N0)
    assert spectral_efficiency(h * k, P, N0) > base
    assert spectral_efficiency(h, P * k, N0) > base
    assert spectral_efficiency(h, P, N0 * k) < base


@given(st.lists(st.tuples(st.floats(0.1, 1e4), st.integers(1, 9)), min_size=1, max_size=4))
def test_traffic_preserves_file_size(files):
    t = Traffic(files=tuple(FileSpec(b, float(k), n) for k, (b, n) in enumerate(files)))
    for ell, (b, n) in enumerate(files, start=1):
        ps = t.packets_of(ell)
        assert len(ps) == n and sum(p.size for p in ps) == b
        assert all(p.size > 0 for p in ps)


@given(st.integers(2, 9), seeds)
def test_random_network_is_pure_and_symmetric(n, seed):
    a = generate_random_network(n, seed)
    assert a == generate_random_network(n, seed)
    assert np.allclose(a.channel, a.channel.T) and not np.any(np.diag(a.channel))
    assert parse_network(emit_network(a)) == a


@given(st.integers(2, 9), seeds)
def test_greedy_visits_every_node_once(n, seed):
    o = init_single_packet_order(generate_random_network(n, seed))
    assert sorted(i for i, _ in o.events) == list(range(1, n + 1))
    assert o.events[0] == (1, 1) and o.events[-1] == (n, 1)


@given(st.integers(3, 7), seeds, st.integers(1, 3), st.data())
def test_swap_is_an_involution(n, seed, N, data):
    net = generate_random_network(n, seed)
    order = initial_order(net, Traffic.single_file(20, N))
    m = data.draw(st.integers(2, len(order)))
    if check_swap(order, m) is None:
        once = apply_swap(order, m)
        assert apply_swap(once, m) == order


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(2, 6), seeds, st.integers(1, 2), st.sampled_from(["per-node", "sum"]))
def test_optimizer_trace_monotone_and_schedules_valid(n, seed, N, mode):
    net = generate_random_network(n, seed, NetworkParams(total_bandwidth=10))
    traffic = Traffic.single_file(20, N)
    rep = optimize(net, traffic, OptimizeConfig(constraints=ConstraintSet(mode)), keep_schedules=True)
    vals = [s.objective for s in rep.trace]
    assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))
    for s in rep.schedules + [rep.schedule]:
        assert replay(net, traffic, s).ok


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), seeds)
def test_simplex_optimal_solutions_are_feasible(n, m, seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-2, 2, (m, n))
    b = rng.uniform(-1, 4, m)
    c = rng.uniform(-3, 3, n)
    lp = from_dense(c, A_ub=np.vstack([A, np.ones(n)]), b_ub=np.append(b, 5.0))
    sol = solve_lp(lp)
    assert sol.status in (Status.OPTIMAL, Status.INFEASIBLE)
    if sol.optimal:
        assert constraint_residuals(lp, sol.x).max() <= 1e-9
        assert sol.x.min() >= -1e-9
