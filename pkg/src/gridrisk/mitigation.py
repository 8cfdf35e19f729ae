"""Residual-risk what-ifs and mitigation prioritization.

A mitigation scales the vulnerability probability and/or impact of every
register entry it targets by ``1 - reduction``; several mitigations on one
entry compose multiplicatively. Threat probability is never touched: a site
cannot change how often hurricanes arrive, only how exposed it is.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from os import PathLike
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from gridrisk.catalog import (
    SCHEMA_VERSION,
    Catalog,
    Finding,
    Mitigation,
    MitigationKind,
    Phase,
    ResilienceAttribute,
    Severity,
    TargetKind,
    parse_number,
)
from gridrisk.errors import ParseError, UnknownMitigation, ValidationError
from gridrisk.register import EntrySource, RiskEntry, RiskRegister, rank_entries
from gridrisk.scoring import RiskTriple, integerize_triple, physical_risk_score

DEFAULT_WEIGHT = Fraction(1)


def _weight(value: object, name: str) -> Fraction:
    value = parse_number(value, name)
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value


@dataclass(frozen=True)
class MitigationPlan:
    mitigation_ids: tuple[str, ...] = ()
    w_difficulty: Fraction = DEFAULT_WEIGHT
    w_cost: Fraction = DEFAULT_WEIGHT

    def __post_init__(self) -> None:
        # ordered set: keep first occurrence
        object.__setattr__(self, "mitigation_ids", tuple(dict.fromkeys(self.mitigation_ids)))
        object.__setattr__(self, "w_difficulty", _weight(self.w_difficulty, "w_difficulty"))
        object.__setattr__(self, "w_cost", _weight(self.w_cost, "w_cost"))

    def resolve(self, catalog: Catalog) -> tuple[Mitigation, ...]:
        missing = [m for m in self.mitigation_ids if not catalog.has_mitigation(m)]
        if missing:
            raise UnknownMitigation(f"unknown mitigation id(s): {', '.join(missing)}")
        return tuple(catalog.mitigation(m) for m in self.mitigation_ids)


_PLAN_KEYS = {"schema_version", "mitigation_ids", "weights"}


def parse_plan(data: bytes | str) -> MitigationPlan:
    """Read a what-if plan document (JSON with ``mitigation_ids`` and
    optional ``weights: {difficulty, cost}``)."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except (ValueError, RecursionError) as exc:
        raise ParseError(str(exc)) from None

    def fail(msg: str) -> ValidationError:
        return ValidationError([Finding(Severity.ERROR, "<plan>", msg)])

    if not isinstance(doc, dict):
        raise fail("plan must be an object")
    unknown = sorted(set(doc) - _PLAN_KEYS)
    if unknown:
        raise fail(f"unknown field {unknown[0]!r}")
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise fail(f"schema_version {doc['schema_version']!r} is not supported")
    ids = doc.get("mitigation_ids", [])
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise fail("mitigation_ids must be a list of strings")
    weights = doc.get("weights", {})
    if not isinstance(weights, dict) or set(weights) - {"difficulty", "cost"}:
        raise fail("weights may only contain 'difficulty' and 'cost'")
    try:
        return MitigationPlan(
            tuple(ids),
            weights.get("difficulty", DEFAULT_WEIGHT),
            weights.get("cost", DEFAULT_WEIGHT),
        )
    except (TypeError, ValueError, ArithmeticError) as exc:
        raise fail(str(exc)) from None


def load_plan(path: Union[str, PathLike[str]]) -> MitigationPlan:
    return parse_plan(Path(path).read_bytes())


def _matches(m: Mitigation, entry: RiskEntry, catalog: Catalog) -> bool:
    vclass = surface = None
    if entry.source is EntrySource.PAIR:
        vclass = catalog.vulnerability(entry.vulnerability.id).vulnerability_class.value
    elif entry.source is EntrySource.CYBER:
        vclass = catalog.vulnerability(entry.vulnerability.id).vulnerability_class.value
        surface = catalog.cyber_entry(entry.threat.id).attack_surface.value
    for t in m.targets:
        if t.kind is TargetKind.THREAT and t.value == entry.threat.id:
            return True
        if t.kind is TargetKind.VULNERABILITY_CLASS and t.value == vclass:
            return True
        if t.kind is TargetKind.ATTACK_SURFACE and t.value == surface:
            return True
    return False


def applicable_mitigations(
    entry: RiskEntry, catalog: Catalog, among: Iterable[Mitigation] | None = None
) -> list[Mitigation]:
    """Mitigations (from ``among``, default all in the catalog) that target
    this entry's threat id, its vulnerability's class, or for cyber entries
    its attack surface. Sorted by id."""
    pool = catalog.mitigations if among is None else among
    return sorted((m for m in pool if _matches(m, entry, catalog)), key=lambda m: m.id)


@dataclass(frozen=True)
class ResidualEntry:
    base: RiskEntry
    applied: tuple[str, ...]
    exact_residual_triple: RiskTriple
    residual_triple: RiskTriple
    residual_score: Fraction
    reduction: Fraction
    rank: int = 0


def _residual(entry: RiskEntry, mitigations: Sequence[Mitigation]) -> ResidualEntry:
    vuln_factor = Fraction(1)
    impact_factor = Fraction(1)
    for m in mitigations:
        vuln_factor *= 1 - m.vuln_reduction
        impact_factor *= 1 - m.impact_reduction
    base = entry.triple
    exact = RiskTriple(base.p_threat, base.p_vulnerability * vuln_factor, base.impact * impact_factor)
    rounded = integerize_triple(exact)
    score = physical_risk_score(rounded)
    return ResidualEntry(
        base=entry,
        applied=tuple(m.id for m in mitigations),
        exact_residual_triple=exact,
        residual_triple=rounded,
        residual_score=score,
        reduction=entry.risk_score - score,
    )


def _residual_key(r: ResidualEntry):
    return (-r.residual_score, -r.residual_triple.impact, r.base.threat.id, r.base.vulnerability.id)


def residual_register(
    register: RiskRegister, plan: MitigationPlan, catalog: Catalog
) -> list[ResidualEntry]:
    """Apply ``plan`` to every entry and re-rank by residual score.

    The residual triple is rounded half-to-even before scoring, as in the
    base register. Raises UnknownMitigation for ids not in ``catalog``.
    """
    chosen = plan.resolve(catalog)
    out = [_residual(e, applicable_mitigations(e, catalog, chosen)) for e in register.entries]
    out.sort(key=_residual_key)
    return [replace(r, rank=i) for i, r in enumerate(out, start=1)]


def residual_as_register(residuals: Iterable[ResidualEntry], fingerprint: str = "") -> RiskRegister:
    """View residuals as a register so it can be diffed against the base."""
    entries = [
        replace(
            r.base,
            triple=r.residual_triple,
            exact_triple=r.exact_residual_triple,
            risk_score=r.residual_score,
        )
        for r in residuals
    ]
    return RiskRegister(rank_entries(entries), fingerprint)


@dataclass(frozen=True)
class MitigationPriority:
    mitigation: Mitigation
    benefit: Fraction
    priority: Fraction
    rank: int = 0


def prioritize_mitigations(
    register: RiskRegister,
    catalog: Catalog,
    weights: tuple[Fraction | int, Fraction | int] = (DEFAULT_WEIGHT, DEFAULT_WEIGHT),
) -> list[MitigationPriority]:
    """Rank every catalog mitigation by benefit per unit of effort.

    benefit is the total score reduction the mitigation achieves alone;
    priority = benefit / (1 + w_difficulty * difficulty + w_cost * cost).
    Ties fall back to benefit, then id.
    """
    w_d = _weight(weights[0], "w_difficulty")
    w_c = _weight(weights[1], "w_cost")
    ranked = []
    for m in catalog.mitigations:
        benefit = sum(
            (_residual(e, [m]).reduction for e in register.entries if _matches(m, e, catalog)),
            Fraction(0),
        )
        priority = benefit / (1 + w_d * m.difficulty + w_c * m.cost)
        ranked.append(MitigationPriority(m, benefit, priority))
    ranked.sort(key=lambda p: (-p.priority, -p.benefit, p.mitigation.id))
    return [replace(p, rank=i) for i, p in enumerate(ranked, start=1)]


@dataclass(frozen=True)
class FiveRSummary:
    """Mitigation ids per (5R attribute, phase, kind) cell; every cell present."""

    cells: Mapping[tuple[ResilienceAttribute, Phase, MitigationKind], tuple[str, ...]]

    def count(self, attribute, phase, kind) -> int:
        return len(self.cells[(ResilienceAttribute(attribute), Phase(phase), MitigationKind(kind))])

    def populated(self) -> dict[tuple[ResilienceAttribute, Phase, MitigationKind], tuple[str, ...]]:
        return {k: v for k, v in self.cells.items() if v}

    def attribute_totals(self) -> dict[ResilienceAttribute, int]:
        totals = {a: 0 for a in ResilienceAttribute}
        for (attr, _, _), ids in self.cells.items():
            totals[attr] += len(ids)
        return totals


def classify_5r(catalog: Catalog) -> FiveRSummary:
    cells: dict = {
        key: [] for key in itertools.product(ResilienceAttribute, Phase, MitigationKind)
    }
    for m in catalog.mitigations:
        for attr in m.attributes:
            cells[(attr, m.phase, m.kind)].append(m.id)
    return FiveRSummary({k: tuple(sorted(v)) for k, v in cells.items()})
