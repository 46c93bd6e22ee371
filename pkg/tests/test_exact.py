import pytest

from nsdcolour import (EnumerationGuardError, Graph, brute_force_chi,
                       complete_graph, conjecture_sweep, cycle_graph,
                       is_valid, path_graph, solve_exact)


# minimum spans pinned by independent exhaustive enumeration
FROZEN = {
    "K2": (Graph(2, [(0, 1)]), 3),
    "P3": (path_graph(3), 3),
    "P4": (path_graph(4), 4),
    "K3": (complete_graph(3), 5),
    "C4": (cycle_graph(4), 4),
    "C5": (cycle_graph(5), 4),
    "star4": (Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]), 5),
    "K4": (complete_graph(4), 5),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_optimum(name):
    g, chi = FROZEN[name]
    res = solve_exact(g)
    assert res.chi_sum_total == chi
    assert res.witness is not None
    assert res.witness.span <= chi
    assert is_valid(g, res.witness)


@pytest.mark.parametrize("name", ["K2", "P3", "K3", "C4"])
def test_brute_matches_backtracker(name):
    g, chi = FROZEN[name]
    assert brute_force_chi(g).chi_sum_total == chi


def test_k3_at_four_colours_impossible():
    res = solve_exact(complete_graph(3), k_max=4)
    assert res.exceeded_k_max
    assert res.chi_sum_total is None


def test_empty_and_tiny_graphs():
    assert solve_exact(Graph(0, [])).chi_sum_total == 1
    assert solve_exact(Graph(3, [])).chi_sum_total == 1


def test_lower_bound_respected():
    # minimum span is always at least max_degree + 1
    for g, chi in FROZEN.values():
        assert chi >= g.max_degree + 1


def test_disconnected_solved_per_component():
    g = Graph(5, [(0, 1), (2, 3), (3, 4)])  # K2 + P3
    res = solve_exact(g)
    assert res.chi_sum_total == 3
    assert is_valid(g, res.witness)


def test_enumeration_guard_trips():
    with pytest.raises(EnumerationGuardError):
        brute_force_chi(complete_graph(6))


def test_sweep_rows_and_verdicts():
    graphs = [("K2", FROZEN["K2"][0]), ("K3", FROZEN["K3"][0]),
              ("C5", FROZEN["C5"][0])]
    rows = conjecture_sweep(graphs)
    assert [r["graph_id"] for r in rows] == ["K2", "K3", "C5"]
    assert all(r["verdict"] == "pass" for r in rows)
    k3 = rows[1]
    assert k3["chi_sum_total"] == 5 and k3["delta_plus_3"] == 5


def test_sweep_unsolved_marker():
    # an absurdly low budget (k_max = max_degree - 2 = 0) forces a give-up
    rows = conjecture_sweep([("K3", complete_graph(3))], k_max_extra=-2)
    assert rows[0]["verdict"].startswith("unsolved")
