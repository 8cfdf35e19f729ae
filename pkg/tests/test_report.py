import csv
import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from gridrisk import report
from gridrisk.interdependency import propagate_failure
from gridrisk.mitigation import MitigationPlan, classify_5r, prioritize_mitigations, residual_register
from gridrisk.register import RiskRegister, assemble_register, diff_registers

from .strategies import catalogs


def rows(data: bytes) -> list[dict]:
    return list(csv.DictReader(io.StringIO(data.decode("utf-8"))))


def test_register_csv_score_column(florida):
    out = report.emit_register_csv(assemble_register(florida))
    assert [r["Risk Score"] for r in rows(out)] == ["567", "480", "448", "300", "300", "175", "144", "64", "24"]
    assert b"\r" not in out


def test_register_csv_header_only_when_empty():
    out = report.emit_register_csv(RiskRegister(()))
    assert out.decode().splitlines() == [",".join(report.REGISTER_COLUMNS)]


def test_radar_series_match_dread_tables(florida):
    series = {s.label: s.values for s in report.emit_radar_data(florida.cyber_entries)}
    names = {c.id: c.name for c in florida.cyber_entries}
    assert series[names["data-sniffing"]] == (2, 5, 5, 10, 10)
    assert series[names["dos-jamming"]] == (7, 5, 7, 10, 10)
    assert series[names["data-tampering"]] == (10, 3, 3, 10, 10)
    assert report.emit_radar_data([]) == []


@pytest.mark.parametrize(
    "value, text",
    [(Fraction(32, 5), "6.4"), (Fraction(39, 5), "7.8"), (Fraction(36, 5), "7.2"), (567, "567"),
     (Fraction(17, 2), "8.5"), (Fraction(1, 3), "0.3"), (Fraction(1, 20), "0.0"), (Fraction(3, 20), "0.2")],
)
def test_format_number(value, text):
    assert report.format_number(value) == text


@pytest.mark.parametrize("p, bucket", [(0, "low"), (3, "low"), (4, "medium"), (6, "medium"), (7, "high"), (10, "high")])
def test_likelihood_buckets(p, bucket):
    assert report.likelihood_bucket(p) == bucket


def test_bar_data(florida):
    bars = report.emit_bar_data(assemble_register(florida))
    assert bars[0].risk_score == 567 and bars[0].threat_likelihood_bucket == "high"
    radar, bar_bytes = report.dumps_plot_data(report.emit_radar_data(florida.cyber_entries), bars)
    assert len(json.loads(bar_bytes)) == 9 and len(json.loads(radar)) == 3


def test_register_doc_round_trip(florida):
    reg = assemble_register(florida)
    data = report.dumps_register_doc(reg)
    again = report.parse_register_doc(data)
    assert again == reg
    assert report.dumps_register_doc(again) == data


@settings(max_examples=100)
@given(catalogs())
def test_register_doc_round_trip_random(cat):
    data = report.dumps_register_doc(assemble_register(cat, include_scenarios=True))
    assert report.dumps_register_doc(report.parse_register_doc(data)) == data


def test_diff_text(florida):
    reg = assemble_register(florida)
    assert report.emit_diff_text(diff_registers(reg, reg)) == ""
    text = report.emit_diff_text(diff_registers(RiskRegister(()), reg))
    assert len(text.splitlines()) == 9 and text.startswith("added ")


def test_residual_and_priority_csv(florida):
    reg = assemble_register(florida)
    residuals = residual_register(reg, MitigationPlan(("elevate-generation",)), florida)
    out = rows(report.emit_residual_csv(residuals))
    surge = next(r for r in out if r["Applied Mitigations"] == "elevate-generation")
    assert (surge["Risk Score"], surge["Base Risk Score"], surge["Reduction"]) == ("162", "567", "405")
    prio = rows(report.emit_priority_csv(prioritize_mitigations(reg, florida)))
    assert prio[0]["Priority"] == "60" and prio[1]["Priority"] == "39.4"


def test_summary_markdown(florida):
    reg = assemble_register(florida)
    text = report.emit_summary_markdown(
        reg,
        residuals=residual_register(reg, MitigationPlan(), florida),
        priorities=prioritize_mitigations(reg, florida),
        five_r=classify_5r(florida),
    )
    for heading in ("# Risk register", "## Residual risk", "## Mitigation priorities",
                    "## Mitigations by resilience attribute"):
        assert heading in text.splitlines()
    assert "| 6.4 |" in text


def test_service_report(energy):
    g = energy.dependency_graph
    doc = report.emit_service_report(propagate_failure(g, {"natural_gas"}), g)
    assert doc["unserved_loads"] == ["heating_load"]
    assert {n["id"]: n["status"] for n in doc["nodes"]}["chp"] == "down"
