"""Serializers for registers, residuals, priorities, and plot data.

All emitters are byte-deterministic: LF newlines, fixed column and key
order, and exact number formatting. Numbers print as integers when
integral and otherwise with one decimal digit (ties to even). The
structured document form keeps exact values as ``"n/d"`` strings so it
parses back losslessly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from gridrisk.catalog import CyberThreatEntry, ResilienceDomain, parse_number
from gridrisk.errors import ParseError
from gridrisk.interdependency import DependencyGraph, ServiceReport
from gridrisk.mitigation import FiveRSummary, MitigationPriority, ResidualEntry
from gridrisk.register import EntrySource, Ref, RegisterDiff, RiskEntry, RiskRegister
from gridrisk.scoring import RiskTriple

REGISTER_COLUMNS = (
    "Rank",
    "Threat",
    "Type of Threat",
    "Vulnerability",
    "Probability of Threat",
    "Probability of Vulnerability",
    "Impact of Vulnerability",
    "Risk Score",
)
RESIDUAL_COLUMNS = REGISTER_COLUMNS + ("Base Risk Score", "Reduction", "Applied Mitigations")
PRIORITY_COLUMNS = ("Mitigation", "Benefit", "Difficulty", "Cost", "Priority", "Rank")
RADAR_AXES = ("Damage", "Reproducibility", "Exploitability", "Affected Users", "Discoverability")

# Likelihood buckets for bar colours; inclusive upper bounds.
LIKELIHOOD_BUCKETS = (("low", 3), ("medium", 6), ("high", 10))

DOC_SCHEMA_VERSION = 1

_CTX = Context(prec=60)


def format_number(value: Fraction | int) -> str:
    """``567`` -> "567", ``32/5`` -> "6.4", ``17/2`` -> "8.5", ``1/3`` -> "0.3"."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    dec = _CTX.divide(Decimal(value.numerator), Decimal(value.denominator))
    return str(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN, context=_CTX))


def _exact(value: Fraction) -> int | str:
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _dumps(doc: Any) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _triple_cells(t: RiskTriple) -> list[str]:
    return [format_number(c) for c in t.as_tuple()]


def emit_register_csv(register: RiskRegister) -> bytes:
    rows = (
        [e.rank, e.threat.name, e.domain.value, e.vulnerability.name, *_triple_cells(e.triple), format_number(e.risk_score)]
        for e in register.entries
    )
    return _csv_bytes(REGISTER_COLUMNS, rows)


def _entry_doc(e: RiskEntry) -> dict[str, Any]:
    return {
        "rank": e.rank,
        "threat": {"id": e.threat.id, "name": e.threat.name},
        "vulnerability": {"id": e.vulnerability.id, "name": e.vulnerability.name},
        "domain": e.domain.value,
        "source": e.source.value,
        "triple": [_exact(c) for c in e.triple.as_tuple()],
        "exact_triple": [_exact(c) for c in e.exact_triple.as_tuple()],
        "risk_score": _exact(e.risk_score),
        "auxiliary_dread": None if e.auxiliary_dread is None else _exact(e.auxiliary_dread),
    }


def emit_register_doc(register: RiskRegister) -> dict[str, Any]:
    return {
        "schema_version": DOC_SCHEMA_VERSION,
        "catalog_fingerprint": register.catalog_fingerprint,
        "entries": [_entry_doc(e) for e in register.entries],
    }


def dumps_register_doc(register: RiskRegister) -> bytes:
    return _dumps(emit_register_doc(register))


def _triple(raw: Sequence[Any]) -> RiskTriple:
    if not isinstance(raw, list) or len(raw) != 3:
        raise ValueError("triple must be a list of three numbers")
    return RiskTriple(*(parse_number(c, "triple") for c in raw))


def parse_register_doc(doc: Mapping[str, Any] | bytes | str) -> RiskRegister:
    """Inverse of :func:`emit_register_doc`."""
    if isinstance(doc, (bytes, str)):
        try:
            doc = json.loads(doc)
        except (ValueError, RecursionError) as exc:
            raise ParseError(f"register document: {exc}") from None
    entries = []
    for raw in doc["entries"]:
        aux = raw.get("auxiliary_dread")
        entries.append(
            RiskEntry(
                threat=Ref(raw["threat"]["id"], raw["threat"]["name"]),
                vulnerability=Ref(raw["vulnerability"]["id"], raw["vulnerability"]["name"]),
                domain=ResilienceDomain(raw["domain"]),
                source=EntrySource(raw["source"]),
                triple=_triple(raw["triple"]),
                exact_triple=_triple(raw["exact_triple"]),
                risk_score=parse_number(raw["risk_score"], "risk_score"),
                auxiliary_dread=None if aux is None else parse_number(aux, "auxiliary_dread"),
                rank=raw["rank"],
            )
        )
    return RiskRegister(tuple(entries), doc.get("catalog_fingerprint", ""))


@dataclass(frozen=True)
class RadarSeries:
    label: str
    values: tuple[int, int, int, int, int]
    axes: tuple[str, ...] = RADAR_AXES

    def to_doc(self) -> dict[str, Any]:
        return {"label": self.label, "axes": list(self.axes), "values": list(self.values)}


def emit_radar_data(cyber_entries: Iterable[CyberThreatEntry]) -> list[RadarSeries]:
    """One five-axis series per cyber entry, in the order given."""
    return [RadarSeries(c.name, c.dread.as_tuple()) for c in cyber_entries]


def likelihood_bucket(p_threat: Fraction | int) -> str:
    for name, upper in LIKELIHOOD_BUCKETS:
        if p_threat <= upper:
            return name
    raise ValueError(f"threat likelihood {p_threat} outside the 0-10 scale")


@dataclass(frozen=True)
class RiskBarDatum:
    threat: str
    p_vulnerability: Fraction
    impact: Fraction
    risk_score: Fraction
    threat_likelihood_bucket: str

    def to_doc(self) -> dict[str, Any]:
        return {
            "threat": self.threat,
            "p_vulnerability": _exact(self.p_vulnerability),
            "impact": _exact(self.impact),
            "risk_score": _exact(self.risk_score),
            "threat_likelihood_bucket": self.threat_likelihood_bucket,
        }


def emit_bar_data(register: RiskRegister) -> list[RiskBarDatum]:
    return [
        RiskBarDatum(
            threat=e.threat.name,
            p_vulnerability=e.triple.p_vulnerability,
            impact=e.triple.impact,
            risk_score=e.risk_score,
            threat_likelihood_bucket=likelihood_bucket(e.triple.p_threat),
        )
        for e in register.entries
    ]


def dumps_plot_data(radar: Sequence[RadarSeries], bars: Sequence[RiskBarDatum]) -> tuple[bytes, bytes]:
    return _dumps([r.to_doc() for r in radar]), _dumps([b.to_doc() for b in bars])


def emit_residual_csv(residuals: Sequence[ResidualEntry]) -> bytes:
    rows = (
        [
            r.rank,
            r.base.threat.name,
            r.base.domain.value,
            r.base.vulnerability.name,
            *_triple_cells(r.residual_triple),
            format_number(r.residual_score),
            format_number(r.base.risk_score),
            format_number(r.reduction),
            ";".join(r.applied),
        ]
        for r in residuals
    )
    return _csv_bytes(RESIDUAL_COLUMNS, rows)


def emit_priority_csv(priorities: Sequence[MitigationPriority]) -> bytes:
    rows = (
        [
            p.mitigation.name,
            format_number(p.benefit),
            p.mitigation.difficulty,
            p.mitigation.cost,
            format_number(p.priority),
            p.rank,
        ]
        for p in priorities
    )
    return _csv_bytes(PRIORITY_COLUMNS, rows)


def emit_diff_text(diff: RegisterDiff) -> str:
    """One line per change; empty string when nothing changed."""
    lines = []
    for e in diff.added:
        lines.append(f"added {e.threat.id}/{e.vulnerability.id}: score {format_number(e.risk_score)}, rank {e.rank}")
    for e in diff.removed:
        lines.append(f"removed {e.threat.id}/{e.vulnerability.id}: score {format_number(e.risk_score)}, rank {e.rank}")
    for c in diff.changed:
        lines.append(
            f"changed {c.threat.id}/{c.vulnerability.id}: score {format_number(c.old_score)} -> "
            f"{format_number(c.new_score)}, rank {c.old_rank} -> {c.new_rank}"
        )
    return "".join(line + "\n" for line in lines)


def emit_service_report(report: ServiceReport, graph: DependencyGraph) -> dict[str, Any]:
    return {
        "failed": list(report.failed),
        "nodes": [
            {
                "id": node_id,
                "kind": graph.node(node_id).kind.value,
                "logic": graph.node(node_id).logic.value,
                "status": "up" if up else "down",
            }
            for node_id, up in report.status.items()
        ],
        "served_loads": list(report.served_loads),
        "unserved_loads": list(report.unserved_loads),
    }


def dumps_service_report(report: ServiceReport, graph: DependencyGraph) -> bytes:
    return _dumps(emit_service_report(report, graph))


def _md_cell(value: object) -> str:
    return str(value).replace("|", "\\|").replace("\n", " ")


def _md_table(header: Sequence[str], rows: Iterable[Sequence[object]]) -> list[str]:
    out = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    out += ["| " + " | ".join(_md_cell(c) for c in row) + " |" for row in rows]
    return out


def emit_summary_markdown(
    register: RiskRegister,
    residuals: Sequence[ResidualEntry] | None = None,
    priorities: Sequence[MitigationPriority] | None = None,
    five_r: FiveRSummary | None = None,
) -> str:
    """Markdown report: the ranked register, then optional residual,
    priority, and 5R sections."""
    lines = ["# Risk register", ""]
    if register.catalog_fingerprint:
        lines += [f"Catalog: `{register.catalog_fingerprint}`", ""]
    lines += _md_table(
        REGISTER_COLUMNS + ("DREAD",),
        (
            [e.rank, e.threat.name, e.domain.value, e.vulnerability.name, *_triple_cells(e.triple),
             format_number(e.risk_score), "" if e.auxiliary_dread is None else format_number(e.auxiliary_dread)]
            for e in register.entries
        ),
    )
    if residuals is not None:
        lines += ["", "## Residual risk", ""]
        lines += _md_table(
            ("Rank", "Threat", "Vulnerability", "Base Risk Score", "Residual Risk Score", "Reduction", "Applied"),
            (
                [r.rank, r.base.threat.name, r.base.vulnerability.name, format_number(r.base.risk_score),
                 format_number(r.residual_score), format_number(r.reduction), ", ".join(r.applied) or "-"]
                for r in residuals
            ),
        )
    if priorities is not None:
        lines += ["", "## Mitigation priorities", ""]
        lines += _md_table(
            PRIORITY_COLUMNS,
            (
                [p.mitigation.name, format_number(p.benefit), p.mitigation.difficulty, p.mitigation.cost,
                 format_number(p.priority), p.rank]
                for p in priorities
            ),
        )
    if five_r is not None:
        lines += ["", "## Mitigations by resilience attribute", ""]
        lines += _md_table(
            ("Attribute", "Phase", "Kind", "Count", "Mitigations"),
            (
                [a.value, ph.value, k.value, len(ids), ", ".join(ids)]
                for (a, ph, k), ids in five_r.populated().items()
            ),
        )
    return "\n".join(lines) + "\n"
