"""The combined physical/cyber risk register and diffs between revisions."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable

from gridrisk.catalog import Catalog, ResilienceDomain, catalog_fingerprint
from gridrisk.interdependency import ScenarioAssessment, interdependency_risk_entries
from gridrisk.scoring import (
    RiskTriple,
    dread_overall,
    integerize_triple,
    map_dread_to_triple,
    physical_risk_score,
)


class EntrySource(str, Enum):
    PAIR = "pair"
    CYBER = "cyber"
    SCENARIO = "scenario"


@dataclass(frozen=True)
class Ref:
    id: str
    name: str


@dataclass(frozen=True)
class RiskEntry:
    """One scored threat/vulnerability combination.

    ``triple`` is the integerized triple the score is computed from;
    ``exact_triple`` keeps the unrounded operands (they differ only for cyber
    entries whose DREAD means land on a half).
    """

    threat: Ref
    vulnerability: Ref
    domain: ResilienceDomain
    source: EntrySource
    triple: RiskTriple
    exact_triple: RiskTriple
    risk_score: Fraction
    auxiliary_dread: Fraction | None = None
    rank: int = 0

    @property
    def key(self) -> tuple[str, str]:
        return (self.threat.id, self.vulnerability.id)


def sort_key(entry: RiskEntry) -> tuple[Fraction, Fraction, str, str]:
    """Register order: score desc, impact desc, threat id, vulnerability id."""
    return (-entry.risk_score, -entry.triple.impact, entry.threat.id, entry.vulnerability.id)


def rank_entries(entries: Iterable[RiskEntry]) -> tuple[RiskEntry, ...]:
    ordered = sorted(entries, key=sort_key)
    return tuple(replace(e, rank=i) for i, e in enumerate(ordered, start=1))


@dataclass(frozen=True)
class RiskRegister:
    entries: tuple[RiskEntry, ...]
    catalog_fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_key(self) -> dict[tuple[str, str], RiskEntry]:
        return {e.key: e for e in self.entries}

    def scores(self) -> list[Fraction]:
        return [e.risk_score for e in self.entries]


def _entry(threat: Ref, vuln: Ref, domain, source, exact: RiskTriple, dread=None) -> RiskEntry:
    triple = integerize_triple(exact)
    return RiskEntry(
        threat=threat,
        vulnerability=vuln,
        domain=domain,
        source=source,
        triple=triple,
        exact_triple=exact,
        risk_score=physical_risk_score(triple),
        auxiliary_dread=dread,
    )


def scenario_entry(assessment: ScenarioAssessment) -> RiskEntry:
    sc = assessment.scenario
    exact = RiskTriple(assessment.p_threat, assessment.p_vulnerability, assessment.impact)
    return _entry(
        Ref(sc.id, sc.name),
        Ref(f"{sc.id}:unserved", assessment.vulnerability_note),
        ResilienceDomain.INTERDEPENDENCY,
        EntrySource.SCENARIO,
        exact,
    )


def assemble_register(catalog: Catalog, include_scenarios: bool = False) -> RiskRegister:
    """Score every pair and cyber entry in ``catalog`` and rank them.

    Physical pairs use (threat likelihood, p_vulnerability, impact) directly.
    Cyber entries go through the DREAD mapping and half-to-even rounding;
    their DREAD mean rides along as ``auxiliary_dread``. With
    ``include_scenarios`` the dependency-graph failure scenarios are scored
    and ranked alongside.
    """
    entries: list[RiskEntry] = []
    for pair in catalog.pairs:
        threat = catalog.threat(pair.threat_id)
        vuln = catalog.vulnerability(pair.vulnerability_id)
        entries.append(
            _entry(
                Ref(threat.id, threat.name),
                Ref(vuln.id, vuln.name),
                threat.domain,
                EntrySource.PAIR,
                RiskTriple(threat.likelihood, pair.p_vulnerability, pair.impact),
            )
        )
    for cyber in catalog.cyber_entries:
        vuln = catalog.vulnerability(cyber.vulnerability_id)
        entries.append(
            _entry(
                Ref(cyber.id, cyber.name),
                Ref(vuln.id, vuln.name),
                ResilienceDomain.CYBER,
                EntrySource.CYBER,
                map_dread_to_triple(cyber.dread),
                dread_overall(cyber.dread),
            )
        )
    if include_scenarios and catalog.dependency_graph is not None:
        entries.extend(scenario_entry(a) for a in interdependency_risk_entries(catalog.dependency_graph))
    return RiskRegister(rank_entries(entries), catalog_fingerprint(catalog))


@dataclass(frozen=True)
class EntryChange:
    threat: Ref
    vulnerability: Ref
    old_score: Fraction
    new_score: Fraction
    old_rank: int
    new_rank: int

    @property
    def key(self) -> tuple[str, str]:
        return (self.threat.id, self.vulnerability.id)

    @property
    def score_changed(self) -> bool:
        return self.old_score != self.new_score


@dataclass(frozen=True)
class RegisterDiff:
    old_fingerprint: str
    new_fingerprint: str
    added: tuple[RiskEntry, ...]
    removed: tuple[RiskEntry, ...]
    changed: tuple[EntryChange, ...]

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed)

    @property
    def score_changes(self) -> tuple[EntryChange, ...]:
        return tuple(c for c in self.changed if c.score_changed)


def diff_registers(old: RiskRegister, new: RiskRegister) -> RegisterDiff:
    """Report entries added, removed, or moved in score or rank.

    Entries are matched on (threat id, vulnerability id). A rank-only change
    (another entry overtook this one) is reported too; use
    :attr:`RegisterDiff.score_changes` to see only re-scored entries.
    """
    before, after = old.by_key(), new.by_key()
    added = tuple(after[k] for k in sorted(after.keys() - before.keys()))
    removed = tuple(before[k] for k in sorted(before.keys() - after.keys()))
    changed = []
    for key in before.keys() & after.keys():
        a, b = before[key], after[key]
        if a.risk_score != b.risk_score or a.rank != b.rank:
            changed.append(EntryChange(b.threat, b.vulnerability, a.risk_score, b.risk_score, a.rank, b.rank))
    changed.sort(key=lambda c: (c.new_rank, c.key))
    return RegisterDiff(old.catalog_fingerprint, new.catalog_fingerprint, added, removed, tuple(changed))
