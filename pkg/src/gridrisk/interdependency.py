"""AND/OR dependency graphs of utilities, converters, and loads.

A graph describes which commodities each piece of equipment needs. Failing
a set of utility sources and propagating in topological order tells which
converters stop and which loads go unserved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from graphlib import CycleError as _GraphlibCycle
from graphlib import TopologicalSorter
from typing import Iterable, Mapping

from gridrisk.errors import CycleError, GraphError, RangeError, UnknownNode

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    SOURCE = "Source"
    CONVERTER = "Converter"
    LOAD = "Load"


class Logic(str, Enum):
    ALL_INPUTS = "AllInputs"
    ANY_INPUT = "AnyInput"


class Commodity(str, Enum):
    ELECTRICITY = "Electricity"
    NATURAL_GAS = "NaturalGas"
    WATER = "Water"
    HEAT = "Heat"


DEFAULT_LOGIC = {
    NodeKind.SOURCE: Logic.ANY_INPUT,
    NodeKind.CONVERTER: Logic.ALL_INPUTS,
    NodeKind.LOAD: Logic.ANY_INPUT,
}


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    commodity: Commodity
    logic: Logic | None = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NodeKind(self.kind))
        object.__setattr__(self, "commodity", Commodity(self.commodity))
        logic = DEFAULT_LOGIC[self.kind] if self.logic is None else Logic(self.logic)
        object.__setattr__(self, "logic", logic)

    @property
    def label(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class Edge:
    """Supply of ``commodity`` from ``source`` to ``target``."""

    source: str
    target: str
    commodity: Commodity

    def __post_init__(self) -> None:
        object.__setattr__(self, "commodity", Commodity(self.commodity))


@dataclass(frozen=True)
class FailureScenario:
    """A named set of source failures with elicited threat scores.

    ``p_vulnerability`` may be left as ``None``; it then follows from the
    graph: 10 when the failure leaves any load unserved, otherwise 0.
    """

    id: str
    name: str
    failed_sources: frozenset[str]
    likelihood: int
    impact: int
    p_vulnerability: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "failed_sources", frozenset(self.failed_sources))
        for attr in ("likelihood", "impact", "p_vulnerability"):
            value = getattr(self, attr)
            if value is None and attr == "p_vulnerability":
                continue
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{attr} must be an integer score")
            if not 0 <= value <= 10:
                raise RangeError(f"{attr}={value} outside [0, 10]")


@dataclass(frozen=True)
class DependencyGraph:
    """Validated on construction; raises CycleError, UnknownNode or GraphError."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    scenarios: tuple[FailureScenario, ...] = ()
    _index: Mapping[str, Node] = field(init=False, repr=False, compare=False)
    _suppliers: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)
    _order: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        index: dict[str, Node] = {}
        for node in self.nodes:
            if node.id in index:
                raise GraphError(f"duplicate node id {node.id!r}")
            index[node.id] = node
        suppliers: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        consumers: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        for edge in self.edges:
            for end in (edge.source, edge.target):
                if end not in index:
                    raise UnknownNode(f"edge {edge.source}->{edge.target} references unknown node {end!r}")
            suppliers[edge.target].add(edge.source)
            consumers[edge.source].add(edge.target)
        for node in self.nodes:
            if node.kind is NodeKind.SOURCE and suppliers[node.id]:
                raise GraphError(f"source {node.id!r} has incoming edges")
            if node.kind is NodeKind.LOAD and consumers[node.id]:
                raise GraphError(f"load {node.id!r} has outgoing edges")
            if node.kind is not NodeKind.SOURCE and not suppliers[node.id]:
                raise GraphError(f"{node.kind.value.lower()} {node.id!r} has no suppliers")
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_suppliers", {k: tuple(sorted(v)) for k, v in suppliers.items()}
        )
        try:
            # sorted so the evaluation order never depends on declaration order
            order = tuple(TopologicalSorter(
                {k: sorted(v) for k, v in sorted(suppliers.items())}
            ).static_order())
        except _GraphlibCycle as exc:
            cycle = " -> ".join(exc.args[1]) if len(exc.args) > 1 else ""
            raise CycleError(f"dependency graph has a cycle: {cycle}") from None
        object.__setattr__(self, "_order", order)
        seen: set[str] = set()
        for sc in self.scenarios:
            if sc.id in seen:
                raise GraphError(f"duplicate scenario id {sc.id!r}")
            seen.add(sc.id)
            self._check_sources(sc.failed_sources)

    def node(self, node_id: str) -> Node:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def suppliers(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._suppliers[node_id]

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(sorted(n.id for n in self.nodes if n.kind is NodeKind.SOURCE))

    @property
    def loads(self) -> tuple[str, ...]:
        return tuple(sorted(n.id for n in self.nodes if n.kind is NodeKind.LOAD))

    @property
    def topological_order(self) -> tuple[str, ...]:
        return self._order

    def _check_sources(self, ids: Iterable[str]) -> None:
        for node_id in ids:
            if self.node(node_id).kind is not NodeKind.SOURCE:
                raise GraphError(f"{node_id!r} is not a source node")


@dataclass(frozen=True)
class ServiceReport:
    failed: tuple[str, ...]
    status: Mapping[str, bool]
    loads: tuple[str, ...]

    @property
    def unserved_loads(self) -> tuple[str, ...]:
        return tuple(k for k in self.loads if not self.status[k])

    @property
    def served_loads(self) -> tuple[str, ...]:
        return tuple(k for k in self.loads if self.status[k])

    def down(self) -> tuple[str, ...]:
        return tuple(k for k, up in self.status.items() if not up)


def propagate_failure(graph: DependencyGraph, failed_sources: Iterable[str]) -> ServiceReport:
    """Evaluate every node's up/down state after ``failed_sources`` go down.

    Sources are up unless failed; AllInputs nodes need every supplier up;
    AnyInput nodes need at least one.
    """
    failed = frozenset(failed_sources)
    graph._check_sources(failed)
    up: dict[str, bool] = {}
    for node_id in graph.topological_order:
        node = graph.node(node_id)
        if node.kind is NodeKind.SOURCE:
            up[node_id] = node_id not in failed
            continue
        inputs = [up[s] for s in graph.suppliers(node_id)]
        up[node_id] = all(inputs) if node.logic is Logic.ALL_INPUTS else any(inputs)
    status = {k: up[k] for k in sorted(up)}
    return ServiceReport(failed=tuple(sorted(failed)), status=status, loads=graph.loads)


@dataclass(frozen=True)
class ScenarioAssessment:
    """Outcome of one failure scenario, ready to join a risk register."""

    scenario: FailureScenario
    report: ServiceReport
    vulnerability_note: str
    p_threat: int
    p_vulnerability: int
    impact: int

    @property
    def risk_score(self) -> Fraction:
        return Fraction(self.p_threat * self.p_vulnerability * self.impact)


def describe_unserved(graph: DependencyGraph, report: ServiceReport) -> str:
    if not report.unserved_loads:
        return "No loads unserved"
    names = ", ".join(graph.node(n).label for n in report.unserved_loads)
    return f"Unserved loads: {names}"


def interdependency_risk_entries(
    graph: DependencyGraph, scenarios: Iterable[FailureScenario] | None = None
) -> list[ScenarioAssessment]:
    """Score each failure scenario with the three-factor product.

    Defaults to the scenarios declared on the graph. Results come back in
    scenario id order.
    """
    chosen = graph.scenarios if scenarios is None else tuple(scenarios)
    out = []
    for sc in sorted(chosen, key=lambda s: s.id):
        report = propagate_failure(graph, sc.failed_sources)
        if sc.p_vulnerability is None:
            p_vuln = 10 if report.unserved_loads else 0
        else:
            p_vuln = sc.p_vulnerability
        out.append(
            ScenarioAssessment(
                scenario=sc,
                report=report,
                vulnerability_note=describe_unserved(graph, report),
                p_threat=sc.likelihood,
                p_vulnerability=p_vuln,
                impact=sc.impact,
            )
        )
    return out
