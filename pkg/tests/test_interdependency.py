import random

import pytest
from hypothesis import given, settings

from gridrisk.errors import CycleError, GraphError, UnknownNode
from gridrisk.interdependency import (
    DependencyGraph,
    Edge,
    FailureScenario,
    Node,
    interdependency_risk_entries,
    propagate_failure,
)

from .oracles.boolean import all_subsets, load_status
from .strategies import graphs, random_graph

LOADS = ("electric_load", "heating_load", "water_load")


@pytest.fixture(params=["integrated-energy", "integrated-energy-chp-heat"])
def graph(request, energy, energy_chp_heat):
    return {"integrated-energy": energy, "integrated-energy-chp-heat": energy_chp_heat}[request.param].dependency_graph


def test_gas_failure(energy):
    result = propagate_failure(energy.dependency_graph, {"natural_gas"})
    assert {"chp", "boiler"} <= set(result.down())
    assert result.unserved_loads == ("heating_load",)
    assert "electric_load" in result.served_loads


def test_gas_failure_with_chp_heat(energy_chp_heat):
    # both heat suppliers need gas, so the extra edge does not help
    result = propagate_failure(energy_chp_heat.dependency_graph, {"natural_gas"})
    assert result.unserved_loads == ("heating_load",)


def test_no_failure_serves_everything(graph):
    result = propagate_failure(graph, set())
    assert result.unserved_loads == () and set(result.served_loads) == set(LOADS)


def test_water_failure(graph):
    result = propagate_failure(graph, {"water"})
    assert {"chp", "boiler", "pump"} <= set(result.down())
    assert set(result.unserved_loads) == {"heating_load", "water_load"}
    assert result.status["electric_load"]
    assert not propagate_failure(graph, {"water", "utility_grid"}).status["electric_load"]


def test_grid_outage_scenario(energy):
    graph = energy.dependency_graph
    by_id = {a.scenario.id: a for a in interdependency_risk_entries(graph)}
    outage = by_id["grid-outage"]
    # the CHP unit keeps the electric bus alive
    assert outage.vulnerability_note == "No loads unserved" and outage.risk_score == 0
    both = FailureScenario("grid-and-gas", "grid and gas", {"utility_grid", "natural_gas"}, 2, 9)
    (a,) = interdependency_risk_entries(graph, [both])
    assert "Electric load" in a.vulnerability_note and a.p_vulnerability == 10
    assert a.risk_score == 2 * 10 * 9


def test_zero_likelihood_scores_zero(energy):
    sc = FailureScenario("calm", "calm", {"natural_gas"}, 0, 9)
    (a,) = interdependency_risk_entries(energy.dependency_graph, [sc])
    assert a.risk_score == 0


def test_all_sources_failed(graph):
    result = propagate_failure(graph, graph.sources)
    assert set(result.unserved_loads) == set(graph.loads)


def test_cycle_rejected():
    nodes = (Node("s", "Source", "Electricity"), Node("a", "Converter", "Heat"), Node("b", "Converter", "Heat"),
             Node("l", "Load", "Heat"))
    edges = (Edge("s", "a", "Electricity"), Edge("b", "a", "Heat"), Edge("a", "b", "Heat"), Edge("b", "l", "Heat"))
    with pytest.raises(CycleError):
        DependencyGraph(nodes, edges)


def test_unknown_nodes(energy):
    with pytest.raises(UnknownNode):
        propagate_failure(energy.dependency_graph, {"moon"})
    with pytest.raises(UnknownNode):
        DependencyGraph((Node("s", "Source", "Water"),), (Edge("s", "ghost", "Water"),))


def test_structural_errors():
    s = Node("s", "Source", "Water")
    with pytest.raises(GraphError):
        DependencyGraph((s, Node("l", "Load", "Water")), ())
    with pytest.raises(GraphError):
        DependencyGraph((s, s), ())


def test_failing_a_non_source(energy):
    with pytest.raises(GraphError):
        propagate_failure(energy.dependency_graph, {"chp"})


def test_declaration_order_does_not_matter(energy):
    g = energy.dependency_graph
    rng = random.Random(7)
    for _ in range(20):
        nodes, edges = list(g.nodes), list(g.edges)
        rng.shuffle(nodes)
        rng.shuffle(edges)
        other = DependencyGraph(tuple(nodes), tuple(edges))
        for failed in all_subsets(g.sources):
            assert propagate_failure(other, failed).status == propagate_failure(g, failed).status


@settings(max_examples=100)
@given(graphs)
def test_matches_boolean_oracle(g):
    for failed in all_subsets(g.sources):
        assert dict(propagate_failure(g, failed).status) == load_status(g.nodes, g.edges, failed)


def test_random_graph_respects_size_limit():
    for seed in range(50):
        g = random_graph(random.Random(seed))
        assert len(g.nodes) - len(g.sources) <= 12
