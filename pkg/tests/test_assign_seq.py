from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowmatch import (
    AssignmentInstance,
    FlowNetwork,
    InfeasibleInstanceError,
    OpCounters,
    ResidualState,
    ScalingState,
    arc_fix,
    begin_refine,
    brute_force_assignment,
    extract_matching,
    is_epsilon_optimal,
    make_scaling_state,
    price_update_heuristic,
    reduce_to_mincost,
    refine_seq,
    solve_assignment,
)


def test_instance_build_validations():
    with pytest.raises(ValueError, match="n must be"):
        AssignmentInstance.build(0, [])
    with pytest.raises(ValueError, match="x out of range"):
        AssignmentInstance.build(2, [(5, 0, 1)])
    with pytest.raises(ValueError, match="y out of range"):
        AssignmentInstance.build(2, [(0, 5, 1)])
    with pytest.raises(ValueError, match="duplicate edge"):
        AssignmentInstance.build(2, [(0, 0, 1), (0, 0, 2)])


def test_instance_complete_flag():
    assert AssignmentInstance.from_matrix([[1, 2], [3, 4]]).complete
    assert not AssignmentInstance.build(2, [(0, 0, 1)]).complete


def test_reduction_shape_and_costs():
    inst = AssignmentInstance.from_matrix([[1, 2], [3, 5]])
    net, supplies = reduce_to_mincost(inst)
    assert net.node_count == 4
    assert net.arc_count == 8
    assert supplies == [1, 1, -1, -1]
    # scaled cost is -(n + 1) * weight on every forward arc
    assert net.cost[0] == -3  # weight 1
    assert net.capacity[0] == 1
    assert net.head[0] == 2
    assert net.cost[6] == -15  # weight 5, x=1 -> y=1


def test_initial_epsilon_is_cost_bound():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[3]]))
    assert scaling.epsilon == 6  # 3 * (n + 1)
    zero = make_scaling_state(AssignmentInstance.from_matrix([[0]]))
    assert zero.epsilon == 1


def test_begin_refine_frozen_single_cell():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[3]]))
    begin_refine(scaling)
    assert scaling.epsilon == 1  # ceil(6 / 10)
    # X price lands so its best arc sits exactly at -epsilon
    assert scaling.state.price == [5, 0]
    assert scaling.state.excess == [1, -1]
    assert scaling.state.residual == [1, 0]


def test_begin_refine_epsilon_never_below_one():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[0]]))
    begin_refine(scaling)
    assert scaling.epsilon == 1
    begin_refine(scaling)
    assert scaling.epsilon == 1


def _manual_scaling(net, inst, supplies, epsilon, bound):
    state = ResidualState.fresh(net)
    return (
        ScalingState(
            net=net,
            instance=inst,
            state=state,
            supplies=supplies,
            epsilon=epsilon,
            alpha=10,
            scaled_cost_bound=bound,
        ),
        state,
    )


def test_price_update_single_hop_frozen():
    net = FlowNetwork(2, None, None)
    net.add_arc_pair(0, 1, 1, 5)
    inst = AssignmentInstance.from_matrix([[0]])
    scaling, state = _manual_scaling(net, inst, [1, -1], 2, 6)
    state.excess = [1, -1]
    assert is_epsilon_optimal(net, state, 2)
    price_update_heuristic(scaling)
    # reduced cost 5 at epsilon 2 puts the tail in bucket 5 // 2 + 1 = 3
    assert state.price == [-6, 0]
    assert is_epsilon_optimal(net, state, 2)


def test_price_update_accumulates_along_multi_hop_paths():
    # chain deficit <- x0 <- y1 <- x1 through one unit of placed flow: labels
    # must accumulate bucket indices hop by hop (0 -> 1 -> 2 -> 3), not reset
    # at each relaxation
    net = FlowNetwork(4, None, None)
    net.add_arc_pair(0, 2, 1, 1)
    placed = net.add_arc_pair(0, 3, 1, 0)
    net.add_arc_pair(1, 3, 1, 1)
    inst = AssignmentInstance.from_matrix([[0, 0], [0, 0]])
    scaling, state = _manual_scaling(net, inst, [1, 1, -1, -1], 2, 10)
    state.residual[placed] -= 1
    state.residual[placed ^ 1] += 1
    state.excess = [0, 1, -1, 0]
    assert is_epsilon_optimal(net, state, 2)
    price_update_heuristic(scaling)
    assert state.price == [-2, -6, 0, -4]
    assert is_epsilon_optimal(net, state, 2)


def test_price_update_noop_without_deficit_or_active():
    net = FlowNetwork(2, None, None)
    net.add_arc_pair(0, 1, 1, 5)
    inst = AssignmentInstance.from_matrix([[0]])
    scaling, state = _manual_scaling(net, inst, [0, 0], 2, 6)
    price_update_heuristic(scaling)
    assert state.price == [0, 0]
    state.excess = [1, 0]  # active but no deficit anywhere
    price_update_heuristic(scaling)
    assert state.price == [0, 0]


def test_arc_fix_threshold_is_strict():
    net = FlowNetwork(2, None, None)
    loose = net.add_arc_pair(0, 1, 1, 17)
    tight = net.add_arc_pair(0, 1, 1, 16)
    inst = AssignmentInstance.from_matrix([[0] * 4 for _ in range(4)])
    scaling, _ = _manual_scaling(net, inst, [0, 0], 2, 17)
    assert arc_fix(scaling) == 1  # threshold 2 * 4 * 2 = 16, only 17 passes
    assert scaling.fixed[loose] and scaling.fixed[loose ^ 1]
    assert not scaling.fixed[tight] and not scaling.fixed[tight ^ 1]
    assert arc_fix(scaling) == 0


def test_refine_seq_single_cell_frozen():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[3]]))
    counters = OpCounters()
    refine_seq(scaling, counters)
    assert scaling.epsilon == 1
    assert scaling.state.excess == [0, 0]
    assert counters.pushes == 1
    assert counters.relabels == 0
    assert extract_matching(scaling) == [0]


def test_solve_frozen_values():
    report, matching = solve_assignment(AssignmentInstance.from_matrix([[7]]))
    assert (report.objective, matching) == (7, [0])

    report, matching = solve_assignment(
        AssignmentInstance.from_matrix([[1, 2], [3, 5]])
    )
    assert (report.objective, matching) == (6, [0, 1])

    report, matching = solve_assignment(
        AssignmentInstance.from_matrix([[3, 8, 2], [6, 4, 9], [5, 7, 1]])
    )
    assert report.objective == 22
    assert matching == [1, 2, 0]
    # max weight 9 scales to 36, reaching 1 after two divisions by 10
    assert report.rounds == 2


def test_solve_fixture_instances(fixture_text):
    from flowmatch import parse_dimacs_asn

    frozen = {
        "assign_complete_n5.asn": 410,
        "assign_sparse_n6.asn": 366,
        "assign_fixed_n8.asn": 695,
    }
    for name, want in frozen.items():
        inst = parse_dimacs_asn(fixture_text(name))
        report, matching = solve_assignment(inst)
        assert report.objective == want
        assert sorted(matching) == list(range(inst.n))


def test_matching_is_a_permutation_of_columns():
    inst = AssignmentInstance.from_matrix([[9, 1], [1, 9]])
    _, matching = solve_assignment(inst)
    assert matching == [0, 1]


def test_infeasible_instance_raises():
    inst = AssignmentInstance.build(2, [(0, 0, 5), (1, 0, 3)])
    with pytest.raises(InfeasibleInstanceError):
        solve_assignment(inst)


def test_epsilon_optimal_after_every_refine():
    rng = random.Random(13)
    for _ in range(8):
        n = rng.randint(1, 6)
        matrix = [[rng.randint(0, 100) for _ in range(n)] for _ in range(n)]
        checked = []

        def check(scaling):
            checked.append(scaling.epsilon)
            assert is_epsilon_optimal(
                scaling.net, scaling.state, scaling.epsilon, scaling.fixed
            )

        solve_assignment(
            AssignmentInstance.from_matrix(matrix), validate=True, on_refine_end=check
        )
        assert checked and checked[-1] == 1


def test_heuristics_off_same_answer():
    rng = random.Random(17)
    for _ in range(10):
        n = rng.randint(1, 6)
        matrix = [[rng.randint(0, 100) for _ in range(n)] for _ in range(n)]
        inst = AssignmentInstance.from_matrix(matrix)
        base = solve_assignment(inst)[0].objective
        bare = solve_assignment(
            inst, use_price_update=False, use_arc_fix=False
        )[0].objective
        assert bare == base


def test_alpha_sweep_same_answer():
    inst = AssignmentInstance.from_matrix([[3, 8, 2], [6, 4, 9], [5, 7, 1]])
    for alpha in (2, 5, 100):
        assert solve_assignment(inst, alpha=alpha)[0].objective == 22


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_matches_brute_force_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    matrix = [[rng.randint(0, 50) for _ in range(n)] for _ in range(n)]
    inst = AssignmentInstance.from_matrix(matrix)
    want, _ = brute_force_assignment(inst)
    assert solve_assignment(inst)[0].objective == want
