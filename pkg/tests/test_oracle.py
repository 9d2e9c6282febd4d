import itertools

import numpy as np
import pytest

from gtsp_colony import CapacityError, Instance, validate_tour
from gtsp_colony.ingest import generate_random_instance
from gtsp_colony.oracle import (
    best_nearest_neighbor,
    exact_optimum_bruteforce,
    exact_optimum_dp,
    nearest_neighbor,
)


def naive_optimum(instance):
    """Every permutation of every selection, no symmetry pruning."""
    best = np.inf
    for pick in itertools.product(*instance.clusters):
        for order in itertools.permutations(pick):
            c = sum(instance.costs[order[k], order[(k + 1) % len(order)]] for k in range(len(order)))
            best = min(best, c)
    return best


def test_three_clusters_of_two_by_hand():
    # clusters {0,1} {2,3} {4,5}; the cheap cycle is 1-3-5
    n = 6
    c = np.full((n, n), 10.0)
    np.fill_diagonal(c, 0)
    for i, j in [(1, 3), (3, 5), (5, 1)]:
        c[i, j] = c[j, i] = 1.0
    c[0, 2] = c[2, 0] = 2.0
    inst = Instance("hand", c, [[0, 1], [2, 3], [4, 5]])
    dp = exact_optimum_dp(inst)
    bf = exact_optimum_bruteforce(inst)
    assert dp.optimum_cost == bf.optimum_cost == 3.0
    assert sorted(dp.optimum_tour.nodes) == [1, 3, 5]


def test_triangle(triangle):
    assert exact_optimum_dp(triangle).optimum_cost == 3
    assert exact_optimum_bruteforce(triangle).optimum_cost == 3


@pytest.mark.parametrize("seed", range(6))
def test_dp_matches_naive_enumeration(seed):
    inst = generate_random_instance(seed=seed, p=4, n=8)
    dp = exact_optimum_dp(inst)
    assert dp.optimum_cost == naive_optimum(inst)
    assert validate_tour(inst, dp.optimum_tour.nodes) == []
    assert dp.optimum_tour.cost == dp.optimum_cost


def test_fixture_optimum(fixture_instance):
    dp = exact_optimum_dp(fixture_instance)
    bf = exact_optimum_bruteforce(fixture_instance)
    assert dp.optimum_cost == bf.optimum_cost == 1717
    assert dp.states_expanded > 0


def test_dp_capacity():
    inst = generate_random_instance(seed=0, p=17, n=17)
    with pytest.raises(CapacityError):
        exact_optimum_dp(inst)
    assert exact_optimum_dp(inst, max_clusters=17).optimum_cost > 0


def test_bruteforce_capacity():
    with pytest.raises(CapacityError):
        exact_optimum_bruteforce(generate_random_instance(seed=0, p=9, n=9))
    with pytest.raises(CapacityError):
        exact_optimum_bruteforce(generate_random_instance(seed=0, p=6, n=30), max_tours=1000)


def test_nearest_neighbor_goldens(fixture_instance):
    assert [nearest_neighbor(fixture_instance, s).cost for s in range(3)] == [2547, 2087, 2133]
    best = best_nearest_neighbor(fixture_instance)
    assert best.nodes == (12, 10, 15, 14, 2, 5) and best.cost == 1922


@pytest.mark.parametrize("seed", range(5))
def test_nearest_neighbor_is_valid_and_bounded(seed):
    inst = generate_random_instance(seed=seed, p=6, n=15)
    opt = exact_optimum_dp(inst).optimum_cost
    for s in range(inst.n):
        t = nearest_neighbor(inst, s)
        assert validate_tour(inst, t.nodes) == []
        assert t.nodes[0] == s
        assert t.cost >= opt
