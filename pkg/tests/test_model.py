import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtsp_colony import InputError, Instance, make_tour, tour_cost, validate_tour
from gtsp_colony.ingest import generate_random_instance
from gtsp_colony.oracle import exact_optimum_dp

from conftest import uniform_instance

SEED7 = generate_random_instance(seed=7, p=6, n=18)
OPT7 = exact_optimum_dp(SEED7).optimum_cost


def resum(instance, nodes):
    total = 0.0
    for k in range(len(nodes)):
        total += instance.costs[nodes[k]][nodes[(k + 1) % len(nodes)]]
    return total


def test_unit_triangle_cost(triangle):
    assert tour_cost(triangle, [0, 1, 2]) == 3
    assert tour_cost(triangle, [2, 0, 1]) == 3


def test_reversal_keeps_cost(fixture_instance):
    nodes = [3, 5, 2, 9, 0, 7]
    assert tour_cost(fixture_instance, nodes) == tour_cost(fixture_instance, nodes[::-1])


def test_cost_matches_direct_resummation():
    inst = generate_random_instance(seed=5, p=5, n=5)
    rng = np.random.default_rng(0)
    nodes = [int(v) for v in rng.permutation(5)]
    assert tour_cost(inst, nodes) == resum(inst, nodes)


def test_unknown_node_rejected(triangle):
    with pytest.raises(InputError):
        tour_cost(triangle, [0, 1, 7])


def test_cluster_visited_twice():
    inst = uniform_instance(3, 2)
    v = validate_tour(inst, [0, 1, 2])
    assert any("cluster visited twice" in s for s in v)


def test_missing_cluster():
    inst = uniform_instance(3, 2)
    v = validate_tour(inst, [0, 2])
    assert any("missing cluster" in s for s in v)


def test_valid_tour_has_no_violations():
    inst = uniform_instance(3, 2)
    assert validate_tour(inst, [1, 2, 5]) == []


@pytest.mark.parametrize(
    "costs, clusters, msg",
    [
        ([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [[0], [1]], "at least 3"),
        ([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [[0, 1], [1], [2]], "belongs to"),
        ([[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]], [[0], [1], [2]], "without a cluster"),
        ([[0, 2, 1], [1, 0, 1], [1, 1, 0]], [[0], [1], [2]], "symmetric"),
        ([[0, -1, 1], [-1, 0, 1], [1, 1, 0]], [[0], [1], [2]], "non-negative"),
        ([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [[0], [1], [2], []], "empty"),
    ],
)
def test_invalid_instances_rejected(costs, clusters, msg):
    with pytest.raises(InputError, match=msg):
        Instance("bad", costs, clusters)


def test_instance_is_read_only(fixture_instance):
    with pytest.raises(ValueError):
        fixture_instance.costs[0, 1] = 5


def test_fixture_optimum_frozen():
    assert OPT7 == 1717


def test_cluster_lookup_is_total(fixture_instance):
    for v in range(fixture_instance.n):
        assert v in fixture_instance.clusters[fixture_instance.cluster_of[v]]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_rotation_and_reversal_invariance(data):
    inst = generate_random_instance(seed=data.draw(st.integers(0, 10_000)), p=6, n=12)
    picks = [data.draw(st.sampled_from(c)) for c in inst.clusters]
    order = data.draw(st.permutations(picks))
    shift = data.draw(st.integers(0, 5))
    rotated = order[shift:] + order[:shift]
    assert tour_cost(inst, rotated) == tour_cost(inst, order)
    assert tour_cost(inst, order[::-1]) == tour_cost(inst, order)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_valid_tours_never_beat_optimum(data):
    inst = SEED7
    picks = [data.draw(st.sampled_from(c)) for c in inst.clusters]
    order = data.draw(st.permutations(picks))
    assert validate_tour(inst, order) == []
    assert make_tour(inst, order).cost >= OPT7
