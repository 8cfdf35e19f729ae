"""Domain types and the JSON catalog format.

A catalog holds everything elicited for one site: threats, vulnerabilities,
scored threat/vulnerability pairs, DREAD-scored cyber threats, candidate
mitigations, and optionally an interdependency graph.

Loading happens in two stages. :func:`parse_catalog` checks the document's
shape (types, ranges, unknown keys) and builds immutable objects.
:func:`validate_catalog` then checks relations between entities and returns
findings instead of raising. :func:`load_catalog` runs both, raises on
errors, logs warnings, and applies the known-vulnerability convention.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from os import PathLike
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, TypeVar, Union

from gridrisk.errors import GridRiskError, ParseError, RangeError, ValidationError
from gridrisk.interdependency import (
    Commodity,
    DependencyGraph,
    Edge,
    FailureScenario,
    Logic,
    Node,
    NodeKind,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ThreatCategory(str, Enum):
    NATURAL = "Natural"
    TECHNOLOGICAL = "Technological"
    ADVERSARIAL = "Adversarial"


class ResilienceDomain(str, Enum):
    PHYSICAL = "Physical"
    CYBER = "Cyber"
    COMMUNICATIONS = "Communications"
    INTERDEPENDENCY = "Interdependency"


class VulnerabilityClass(str, Enum):
    PHYSICAL = "Physical"
    NATURAL = "Natural"
    CYBER = "Cyber"
    COMMUNICATION = "Communication"
    HUMAN = "Human"


class AttackSurface(str, Enum):
    WIRED_LINKS = "WiredLinks"
    WIRELESS_LINKS = "WirelessLinks"
    UNENCRYPTED_COMMUNICATIONS = "UnencryptedCommunications"
    UNAUTHENTICATED_COMMUNICATIONS = "UnauthenticatedCommunications"
    EXPOSED_ENDPOINTS = "ExposedEndpoints"
    HUMAN = "Human"


class Stride(str, Enum):
    SPOOFING = "Spoofing"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "InformationDisclosure"
    DENIAL_OF_SERVICE = "DenialOfService"
    ELEVATION_OF_PRIVILEGE = "ElevationOfPrivilege"


class CiaClass(str, Enum):
    AVAILABILITY = "Availability"
    INTEGRITY = "Integrity"
    CONFIDENTIALITY = "Confidentiality"


class ResilienceAttribute(str, Enum):
    ROBUSTNESS = "Robustness"
    REDUNDANCY = "Redundancy"
    RESOURCEFULNESS = "Resourcefulness"
    RESPONSE = "Response"
    RECOVERY = "Recovery"


class Phase(str, Enum):
    PRE_DISASTER = "PreDisaster"
    DURING_DISASTER = "DuringDisaster"
    POST_DISASTER = "PostDisaster"


class MitigationKind(str, Enum):
    SYSTEM_HARDENING = "SystemHardening"
    OPERATIONAL = "Operational"


class TargetKind(str, Enum):
    THREAT = "threat"
    VULNERABILITY_CLASS = "class"
    ATTACK_SURFACE = "surface"


E = TypeVar("E", bound=Enum)


def _enum(cls: type[E], value: object, name: str) -> E:
    if isinstance(value, cls):
        return value
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)  # type: ignore[attr-defined]
        raise ValueError(f"{name}: {value!r} is not one of {allowed}") from None


def check_score(value: object, name: str = "score") -> int:
    """Return ``value`` if it is an integer on the 0-10 scale."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an integer score, got {value!r}")
    if not 0 <= value <= 10:
        raise RangeError(f"{name}={value} outside [0, 10]")
    return value


def check_fraction(value: object, name: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"{name} must be an int or Fraction, got {value!r}")
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise RangeError(f"{name}={value} outside [0, 1]")
    return value


def _text(value: object, name: str) -> str:
    if not isinstance(value, str):
        raise TypeError(f"{name} must be a string, got {value!r}")
    return value


def _ident(value: object, name: str = "id") -> str:
    value = _text(value, name)
    if not value:
        raise ValueError(f"{name} must be non-empty")
    return value


@dataclass(frozen=True)
class Threat:
    id: str
    name: str
    category: ThreatCategory
    domain: ResilienceDomain
    likelihood: int
    evidence: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "category", _enum(ThreatCategory, self.category, "category"))
        object.__setattr__(self, "domain", _enum(ResilienceDomain, self.domain, "domain"))
        check_score(self.likelihood, "likelihood")


@dataclass(frozen=True)
class Vulnerability:
    id: str
    name: str
    vulnerability_class: VulnerabilityClass
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "vulnerability_class", _enum(VulnerabilityClass, self.vulnerability_class, "class")
        )


@dataclass(frozen=True)
class PairAssessment:
    threat_id: str
    vulnerability_id: str
    p_vulnerability: int
    impact: int
    rationale: str = ""

    def __post_init__(self) -> None:
        check_score(self.p_vulnerability, "p_vulnerability")
        check_score(self.impact, "impact")

    @property
    def key(self) -> tuple[str, str]:
        return (self.threat_id, self.vulnerability_id)


@dataclass(frozen=True)
class DreadScore:
    damage: int
    reproducibility: int
    exploitability: int
    affected_users: int
    discoverability: int

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            check_score(getattr(self, f.name), f.name)

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (
            self.damage,
            self.reproducibility,
            self.exploitability,
            self.affected_users,
            self.discoverability,
        )


@dataclass(frozen=True)
class CyberThreatEntry:
    """A DREAD-scored attack against one vulnerability.

    The known-vulnerability convention (discoverability pinned to 10) is not
    enforced here; :func:`validate_catalog` warns about it and
    :func:`normalize_catalog` applies it.
    """

    id: str
    name: str
    attack_surface: AttackSurface
    stride_tags: frozenset[Stride]
    cia_class: CiaClass
    vulnerability_id: str
    dread: DreadScore
    known_vulnerability: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "attack_surface", _enum(AttackSurface, self.attack_surface, "attack_surface")
        )
        object.__setattr__(
            self, "stride_tags", frozenset(_enum(Stride, t, "stride_tags") for t in self.stride_tags)
        )
        object.__setattr__(self, "cia_class", _enum(CiaClass, self.cia_class, "cia_class"))
        if not isinstance(self.known_vulnerability, bool):
            raise TypeError("known_vulnerability must be a boolean")


@dataclass(frozen=True, order=True)
class Target:
    """What a mitigation acts on: a threat id, a vulnerability class, or an
    attack surface. Written in files as ``kind:value``."""

    kind: TargetKind
    value: str

    def __post_init__(self) -> None:
        kind = _enum(TargetKind, self.kind, "target kind")
        object.__setattr__(self, "kind", kind)
        if kind is TargetKind.VULNERABILITY_CLASS:
            object.__setattr__(self, "value", _enum(VulnerabilityClass, self.value, "target class").value)
        elif kind is TargetKind.ATTACK_SURFACE:
            object.__setattr__(self, "value", _enum(AttackSurface, self.value, "target surface").value)
        else:
            _ident(self.value, "target threat id")

    @classmethod
    def parse(cls, text: str) -> Target:
        kind, sep, value = _text(text, "target").partition(":")
        if not sep:
            raise ValueError(f"target {text!r} must look like kind:value")
        return cls(_enum(TargetKind, kind, "target kind"), value)

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.value}"


@dataclass(frozen=True)
class Mitigation:
    id: str
    name: str
    attributes: frozenset[ResilienceAttribute]
    phase: Phase
    kind: MitigationKind
    targets: frozenset[Target]
    vuln_reduction: Fraction = Fraction(0)
    impact_reduction: Fraction = Fraction(0)
    difficulty: int = 0
    cost: int = 0
    evidence: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "attributes",
            frozenset(_enum(ResilienceAttribute, a, "attributes") for a in self.attributes),
        )
        object.__setattr__(self, "phase", _enum(Phase, self.phase, "phase"))
        object.__setattr__(self, "kind", _enum(MitigationKind, self.kind, "kind"))
        object.__setattr__(
            self, "targets", frozenset(t if isinstance(t, Target) else Target.parse(t) for t in self.targets)
        )
        object.__setattr__(self, "vuln_reduction", check_fraction(self.vuln_reduction, "vuln_reduction"))
        object.__setattr__(self, "impact_reduction", check_fraction(self.impact_reduction, "impact_reduction"))
        check_score(self.difficulty, "difficulty")
        check_score(self.cost, "cost")


@dataclass(frozen=True)
class Catalog:
    schema_version: int = SCHEMA_VERSION
    threats: tuple[Threat, ...] = ()
    vulnerabilities: tuple[Vulnerability, ...] = ()
    pairs: tuple[PairAssessment, ...] = ()
    cyber_entries: tuple[CyberThreatEntry, ...] = ()
    mitigations: tuple[Mitigation, ...] = ()
    dependency_graph: DependencyGraph | None = None

    def __post_init__(self) -> None:
        for name in ("threats", "vulnerabilities", "pairs", "cyber_entries", "mitigations"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @cached_property
    def _threats(self) -> dict[str, Threat]:
        return {t.id: t for t in self.threats}

    @cached_property
    def _vulnerabilities(self) -> dict[str, Vulnerability]:
        return {v.id: v for v in self.vulnerabilities}

    @cached_property
    def _cyber(self) -> dict[str, CyberThreatEntry]:
        return {c.id: c for c in self.cyber_entries}

    @cached_property
    def _mitigations(self) -> dict[str, Mitigation]:
        return {m.id: m for m in self.mitigations}

    def threat(self, threat_id: str) -> Threat:
        return self._threats[threat_id]

    def vulnerability(self, vulnerability_id: str) -> Vulnerability:
        return self._vulnerabilities[vulnerability_id]

    def cyber_entry(self, entry_id: str) -> CyberThreatEntry:
        return self._cyber[entry_id]

    def mitigation(self, mitigation_id: str) -> Mitigation:
        return self._mitigations[mitigation_id]

    def has_mitigation(self, mitigation_id: str) -> bool:
        return mitigation_id in self._mitigations

    @property
    def scenarios(self) -> tuple[FailureScenario, ...]:
        return self.dependency_graph.scenarios if self.dependency_graph else ()


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, order=True)
class Finding:
    severity: Severity
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.entity}: {self.message}"


def _duplicates(ids: Iterable[str]) -> set[str]:
    seen: set[str] = set()
    dup: set[str] = set()
    for i in ids:
        (dup if i in seen else seen).add(i)
    return dup


def validate_catalog(catalog: Catalog) -> list[Finding]:
    """Check cross-entity invariants. Returns sorted findings; never raises."""
    out: list[Finding] = []

    def err(entity: str, msg: str) -> None:
        out.append(Finding(Severity.ERROR, entity, msg))

    def warn(entity: str, msg: str) -> None:
        out.append(Finding(Severity.WARNING, entity, msg))

    if catalog.schema_version != SCHEMA_VERSION:
        err("<catalog>", f"schema_version {catalog.schema_version} is not supported (expected {SCHEMA_VERSION})")

    sections = {
        "threat": [t.id for t in catalog.threats],
        "vulnerability": [v.id for v in catalog.vulnerabilities],
        "cyber entry": [c.id for c in catalog.cyber_entries],
        "mitigation": [m.id for m in catalog.mitigations],
    }
    for label, ids in sections.items():
        for dup in _duplicates(ids):
            err(dup, f"duplicate {label} id")
    for dup in _duplicates(f"{p.threat_id}/{p.vulnerability_id}" for p in catalog.pairs):
        err(dup, "duplicate pair assessment")

    threat_ids = set(sections["threat"])
    vuln_ids = set(sections["vulnerability"])
    cyber_ids = set(sections["cyber entry"])
    scenario_ids = {s.id for s in catalog.scenarios}
    for clash in sorted(threat_ids & cyber_ids):
        err(clash, "id used by both a threat and a cyber entry")
    for clash in sorted(scenario_ids & (threat_ids | cyber_ids)):
        err(clash, "scenario id collides with a threat or cyber entry id")

    for p in catalog.pairs:
        entity = f"{p.threat_id}/{p.vulnerability_id}"
        if p.threat_id not in threat_ids:
            err(entity, f"dangling reference to threat {p.threat_id!r}")
        if p.vulnerability_id not in vuln_ids:
            err(entity, f"dangling reference to vulnerability {p.vulnerability_id!r}")

    for c in catalog.cyber_entries:
        if c.vulnerability_id not in vuln_ids:
            err(c.id, f"dangling reference to vulnerability {c.vulnerability_id!r}")
        if c.known_vulnerability and c.dread.discoverability != 10:
            warn(
                c.id,
                f"known vulnerability with discoverability {c.dread.discoverability}; normalized to 10",
            )

    threat_like = threat_ids | cyber_ids | scenario_ids
    for m in catalog.mitigations:
        if not m.targets:
            err(m.id, "mitigation has no targets")
        if not m.attributes:
            err(m.id, "mitigation has no resilience attributes")
        for t in m.targets:
            if t.kind is TargetKind.THREAT and t.value not in threat_like:
                err(m.id, f"dangling reference to threat {t.value!r}")

    paired = {p.threat_id for p in catalog.pairs}
    for t in catalog.threats:
        if t.id not in paired:
            warn(t.id, "unpaired threat: no vulnerability assessed against it")

    return sorted(set(out))


def normalize_catalog(catalog: Catalog) -> Catalog:
    """Pin discoverability to 10 for cyber entries on known vulnerabilities."""
    fixed = []
    changed = False
    for c in catalog.cyber_entries:
        if c.known_vulnerability and c.dread.discoverability != 10:
            c = dataclasses.replace(c, dread=dataclasses.replace(c.dread, discoverability=10))
            changed = True
        fixed.append(c)
    return dataclasses.replace(catalog, cyber_entries=tuple(fixed)) if changed else catalog


# --- document parsing -------------------------------------------------------

_FRACTION_RE = re.compile(r"\d{1,12}(/\d{1,12})?|\d{0,12}\.\d{1,12}")

_TOP_KEYS = {
    "schema_version", "threats", "vulnerabilities", "pairs",
    "cyber_entries", "mitigations", "dependency_graph",
}


def _reject_constant(name: str) -> Any:
    raise ValueError(f"non-finite number {name} is not allowed")


def _unique_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


def parse_number(value: object, name: str) -> Fraction:
    """Exact value of a JSON number or an ``"n/d"`` / decimal string."""
    if isinstance(value, bool):
        raise TypeError(f"{name} must be a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str) and _FRACTION_RE.fullmatch(value):
        return Fraction(value)
    raise TypeError(f"{name} must be a number or 'n/d' string, got {value!r}")


def _fraction_from_doc(value: object, name: str) -> Fraction:
    return check_fraction(parse_number(value, name), name)


def _fraction_to_doc(value: Fraction) -> int | str:
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _str_list(value: object, name: str) -> list[str]:
    if not isinstance(value, list):
        raise TypeError(f"{name} must be a list")
    return [_text(v, name) for v in value]


@dataclass
class _Parser:
    findings: list[Finding] = field(default_factory=list)

    def error(self, entity: str, message: str) -> None:
        self.findings.append(Finding(Severity.ERROR, entity, message))

    def entity(
        self,
        raw: object,
        label: str,
        required: set[str],
        optional: set[str],
        build: Callable[[Mapping[str, Any]], Any],
        naming: Callable[[Mapping[str, Any]], str | None] = lambda r: r.get("id") if isinstance(r.get("id"), str) else None,
    ) -> Any:
        if not isinstance(raw, dict):
            self.error(label, "entry must be an object")
            return None
        name = naming(raw) or label
        bad = False
        for key in sorted(set(raw) - required - optional):
            self.error(name, f"unknown field {key!r}")
            bad = True
        for key in sorted(required - set(raw)):
            self.error(name, f"missing field {key!r}")
            bad = True
        if bad:
            return None
        try:
            return build(raw)
        except (ValueError, TypeError, ArithmeticError, GridRiskError) as exc:
            self.error(name, str(exc))
            return None

    def section(self, doc: Mapping[str, Any], key: str) -> list[Any]:
        value = doc.get(key, [])
        if not isinstance(value, list):
            self.error("<catalog>", f"{key} must be a list")
            return []
        return value


def _build_threat(r: Mapping[str, Any]) -> Threat:
    return Threat(
        id=_ident(r["id"]),
        name=_text(r["name"], "name"),
        category=_enum(ThreatCategory, r["category"], "category"),
        domain=_enum(ResilienceDomain, r["domain"], "domain"),
        likelihood=check_score(r["likelihood"], "likelihood"),
        evidence=_text(r.get("evidence", ""), "evidence"),
    )


def _build_vulnerability(r: Mapping[str, Any]) -> Vulnerability:
    return Vulnerability(
        id=_ident(r["id"]),
        name=_text(r["name"], "name"),
        vulnerability_class=_enum(VulnerabilityClass, r["class"], "class"),
        description=_text(r.get("description", ""), "description"),
    )


def _build_pair(r: Mapping[str, Any]) -> PairAssessment:
    return PairAssessment(
        threat_id=_ident(r["threat_id"], "threat_id"),
        vulnerability_id=_ident(r["vulnerability_id"], "vulnerability_id"),
        p_vulnerability=check_score(r["p_vulnerability"], "p_vulnerability"),
        impact=check_score(r["impact"], "impact"),
        rationale=_text(r.get("rationale", ""), "rationale"),
    )


_DREAD_KEYS = {"damage", "reproducibility", "exploitability", "affected_users", "discoverability"}


def _build_dread(raw: object) -> DreadScore:
    if not isinstance(raw, dict):
        raise TypeError("dread must be an object")
    unknown = sorted(set(raw) - _DREAD_KEYS)
    missing = sorted(_DREAD_KEYS - set(raw))
    if unknown:
        raise ValueError(f"unknown field {unknown[0]!r} in dread")
    if missing:
        raise ValueError(f"missing field {missing[0]!r} in dread")
    return DreadScore(**{k: check_score(raw[k], k) for k in _DREAD_KEYS})


def _build_cyber(r: Mapping[str, Any]) -> CyberThreatEntry:
    return CyberThreatEntry(
        id=_ident(r["id"]),
        name=_text(r["name"], "name"),
        attack_surface=_enum(AttackSurface, r["attack_surface"], "attack_surface"),
        stride_tags=frozenset(_enum(Stride, t, "stride_tags") for t in _str_list(r.get("stride_tags", []), "stride_tags")),
        cia_class=_enum(CiaClass, r["cia_class"], "cia_class"),
        vulnerability_id=_ident(r["vulnerability_id"], "vulnerability_id"),
        dread=_build_dread(r["dread"]),
        known_vulnerability=r.get("known_vulnerability", False),
    )


def _build_mitigation(r: Mapping[str, Any]) -> Mitigation:
    return Mitigation(
        id=_ident(r["id"]),
        name=_text(r["name"], "name"),
        attributes=frozenset(
            _enum(ResilienceAttribute, a, "attributes") for a in _str_list(r["attributes"], "attributes")
        ),
        phase=_enum(Phase, r["phase"], "phase"),
        kind=_enum(MitigationKind, r["kind"], "kind"),
        targets=frozenset(Target.parse(t) for t in _str_list(r["targets"], "targets")),
        vuln_reduction=_fraction_from_doc(r.get("vuln_reduction", 0), "vuln_reduction"),
        impact_reduction=_fraction_from_doc(r.get("impact_reduction", 0), "impact_reduction"),
        difficulty=check_score(r.get("difficulty", 0), "difficulty"),
        cost=check_score(r.get("cost", 0), "cost"),
        evidence=_text(r.get("evidence", ""), "evidence"),
    )


def _build_node(r: Mapping[str, Any]) -> Node:
    logic = r.get("logic")
    return Node(
        id=_ident(r["id"]),
        kind=_enum(NodeKind, r["kind"], "kind"),
        commodity=_enum(Commodity, r["commodity"], "commodity"),
        logic=None if logic is None else _enum(Logic, logic, "logic"),
        name=_text(r.get("name", ""), "name"),
    )


def _build_edge(r: Mapping[str, Any]) -> Edge:
    return Edge(
        source=_ident(r["from"], "from"),
        target=_ident(r["to"], "to"),
        commodity=_enum(Commodity, r["commodity"], "commodity"),
    )


def _build_scenario(r: Mapping[str, Any]) -> FailureScenario:
    p_vuln = r.get("p_vulnerability")
    return FailureScenario(
        id=_ident(r["id"]),
        name=_text(r["name"], "name"),
        failed_sources=frozenset(_str_list(r["fail"], "fail")),
        likelihood=check_score(r["likelihood"], "likelihood"),
        impact=check_score(r["impact"], "impact"),
        p_vulnerability=None if p_vuln is None else check_score(p_vuln, "p_vulnerability"),
    )


def _build_graph(p: _Parser, raw: object) -> DependencyGraph | None:
    if not isinstance(raw, dict):
        p.error("dependency_graph", "must be an object")
        return None
    before = len(p.findings)
    for key in sorted(set(raw) - {"nodes", "edges", "scenarios"}):
        p.error("dependency_graph", f"unknown field {key!r}")
    nodes = [
        p.entity(n, f"dependency_graph.nodes[{i}]", {"id", "kind", "commodity"}, {"logic", "name"}, _build_node)
        for i, n in enumerate(p.section(raw, "nodes"))
    ]
    edges = [
        p.entity(
            e, f"dependency_graph.edges[{i}]", {"from", "to", "commodity"}, set(), _build_edge,
            naming=lambda r: f"{r.get('from')}->{r.get('to')}",
        )
        for i, e in enumerate(p.section(raw, "edges"))
    ]
    scenarios = [
        p.entity(
            s, f"dependency_graph.scenarios[{i}]",
            {"id", "name", "fail", "likelihood", "impact"}, {"p_vulnerability"}, _build_scenario,
        )
        for i, s in enumerate(p.section(raw, "scenarios"))
    ]
    if len(p.findings) != before:
        return None
    try:
        return DependencyGraph(tuple(nodes), tuple(edges), tuple(scenarios))
    except GridRiskError as exc:
        p.error("dependency_graph", str(exc))
        return None


def parse_catalog(data: bytes | str) -> Catalog:
    """Build a catalog from document text without relational checks.

    Raises ParseError for anything that is not valid UTF-8 JSON and
    ValidationError for shape problems (unknown keys, wrong types, scores
    out of range).
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8 at byte {exc.start}") from None
    else:
        text = data
    try:
        doc = json.loads(text, object_pairs_hook=_unique_keys, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except (ValueError, RecursionError) as exc:
        raise ParseError(str(exc) or type(exc).__name__) from None

    p = _Parser()
    if not isinstance(doc, dict):
        raise ValidationError([Finding(Severity.ERROR, "<catalog>", "top level must be an object")])
    for key in sorted(set(doc) - _TOP_KEYS):
        p.error("<catalog>", f"unknown field {key!r}")
    version = doc.get("schema_version")
    if "schema_version" not in doc:
        p.error("<catalog>", "missing field 'schema_version'")
    elif version != SCHEMA_VERSION or isinstance(version, bool):
        p.error("<catalog>", f"schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")

    threats = [
        p.entity(r, f"threats[{i}]", {"id", "name", "category", "domain", "likelihood"}, {"evidence"}, _build_threat)
        for i, r in enumerate(p.section(doc, "threats"))
    ]
    vulns = [
        p.entity(r, f"vulnerabilities[{i}]", {"id", "name", "class"}, {"description"}, _build_vulnerability)
        for i, r in enumerate(p.section(doc, "vulnerabilities"))
    ]
    pairs = [
        p.entity(
            r, f"pairs[{i}]", {"threat_id", "vulnerability_id", "p_vulnerability", "impact"}, {"rationale"},
            _build_pair, naming=lambda r: f"{r.get('threat_id')}/{r.get('vulnerability_id')}",
        )
        for i, r in enumerate(p.section(doc, "pairs"))
    ]
    cyber = [
        p.entity(
            r, f"cyber_entries[{i}]",
            {"id", "name", "attack_surface", "cia_class", "vulnerability_id", "dread"},
            {"stride_tags", "known_vulnerability"}, _build_cyber,
        )
        for i, r in enumerate(p.section(doc, "cyber_entries"))
    ]
    mitigations = [
        p.entity(
            r, f"mitigations[{i}]", {"id", "name", "attributes", "phase", "kind", "targets"},
            {"vuln_reduction", "impact_reduction", "difficulty", "cost", "evidence"}, _build_mitigation,
        )
        for i, r in enumerate(p.section(doc, "mitigations"))
    ]
    graph = None
    if doc.get("dependency_graph") is not None:
        graph = _build_graph(p, doc["dependency_graph"])

    if p.findings:
        raise ValidationError(sorted(set(p.findings)))
    return Catalog(
        schema_version=SCHEMA_VERSION,
        threats=tuple(threats),
        vulnerabilities=tuple(vulns),
        pairs=tuple(pairs),
        cyber_entries=tuple(cyber),
        mitigations=tuple(mitigations),
        dependency_graph=graph,
    )


def loads_catalog(data: bytes | str) -> Catalog:
    """Parse, validate, and normalize document text into a Catalog."""
    catalog = parse_catalog(data)
    findings = validate_catalog(catalog)
    errors = [f for f in findings if f.severity is Severity.ERROR]
    if errors:
        raise ValidationError(errors)
    for f in findings:
        logger.warning("%s: %s", f.entity, f.message)
    return normalize_catalog(catalog)


def load_catalog(path: Union[str, PathLike[str]]) -> Catalog:
    """Read and fully validate the catalog file at ``path``."""
    return loads_catalog(Path(path).read_bytes())


# --- serialization ----------------------------------------------------------


def _threat_doc(t: Threat) -> dict[str, Any]:
    return {
        "id": t.id, "name": t.name, "category": t.category.value,
        "domain": t.domain.value, "likelihood": t.likelihood, "evidence": t.evidence,
    }


def _mitigation_doc(m: Mitigation) -> dict[str, Any]:
    return {
        "id": m.id,
        "name": m.name,
        "attributes": sorted(a.value for a in m.attributes),
        "phase": m.phase.value,
        "kind": m.kind.value,
        "targets": sorted(str(t) for t in m.targets),
        "vuln_reduction": _fraction_to_doc(m.vuln_reduction),
        "impact_reduction": _fraction_to_doc(m.impact_reduction),
        "difficulty": m.difficulty,
        "cost": m.cost,
        "evidence": m.evidence,
    }


def _graph_doc(g: DependencyGraph) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "logic": n.logic.value, "commodity": n.commodity.value, "name": n.name}
            for n in g.nodes
        ],
        "edges": [{"from": e.source, "to": e.target, "commodity": e.commodity.value} for e in g.edges],
    }
    if g.scenarios:
        doc["scenarios"] = []
        for s in g.scenarios:
            sd: dict[str, Any] = {
                "id": s.id, "name": s.name, "fail": sorted(s.failed_sources),
                "likelihood": s.likelihood, "impact": s.impact,
            }
            if s.p_vulnerability is not None:
                sd["p_vulnerability"] = s.p_vulnerability
            doc["scenarios"].append(sd)
    return doc


def catalog_to_doc(catalog: Catalog) -> dict[str, Any]:
    """Plain-data form of ``catalog``; list order is preserved."""
    doc: dict[str, Any] = {
        "schema_version": catalog.schema_version,
        "threats": [_threat_doc(t) for t in catalog.threats],
        "vulnerabilities": [
            {"id": v.id, "name": v.name, "class": v.vulnerability_class.value, "description": v.description}
            for v in catalog.vulnerabilities
        ],
        "pairs": [
            {
                "threat_id": p.threat_id, "vulnerability_id": p.vulnerability_id,
                "p_vulnerability": p.p_vulnerability, "impact": p.impact, "rationale": p.rationale,
            }
            for p in catalog.pairs
        ],
        "cyber_entries": [
            {
                "id": c.id,
                "name": c.name,
                "attack_surface": c.attack_surface.value,
                "stride_tags": sorted(s.value for s in c.stride_tags),
                "cia_class": c.cia_class.value,
                "vulnerability_id": c.vulnerability_id,
                "dread": dict(zip(
                    ("damage", "reproducibility", "exploitability", "affected_users", "discoverability"),
                    c.dread.as_tuple(),
                )),
                "known_vulnerability": c.known_vulnerability,
            }
            for c in catalog.cyber_entries
        ],
        "mitigations": [_mitigation_doc(m) for m in catalog.mitigations],
    }
    if catalog.dependency_graph is not None:
        doc["dependency_graph"] = _graph_doc(catalog.dependency_graph)
    return doc


def dump_catalog(catalog: Catalog) -> str:
    return json.dumps(catalog_to_doc(catalog), indent=2, ensure_ascii=False) + "\n"


def _canonical_doc(catalog: Catalog) -> dict[str, Any]:
    doc = catalog_to_doc(catalog)
    for key in ("threats", "vulnerabilities", "cyber_entries", "mitigations"):
        doc[key].sort(key=lambda d: d["id"])
    doc["pairs"].sort(key=lambda d: (d["threat_id"], d["vulnerability_id"]))
    graph = doc.get("dependency_graph")
    if graph:
        graph["nodes"].sort(key=lambda d: d["id"])
        graph["edges"].sort(key=lambda d: (d["from"], d["to"], d["commodity"]))
        graph.get("scenarios", []).sort(key=lambda d: d["id"])
    return doc


def catalog_fingerprint(catalog: Catalog) -> str:
    """Content hash that ignores list order in the source file."""
    blob = json.dumps(_canonical_doc(catalog), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return "sha256:" + hashlib.sha256(blob.encode("ascii")).hexdigest()
