import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridrisk.catalog import (
    Catalog,
    Severity,
    Target,
    TargetKind,
    catalog_fingerprint,
    dump_catalog,
    loads_catalog,
    parse_catalog,
    validate_catalog,
)
from gridrisk.cli import sample_path
from gridrisk.errors import GridRiskError, ParseError, ValidationError

from .conftest import SAMPLES
from .strategies import catalogs, quick_catalogs


def minimal_doc() -> dict:
    return {
        "schema_version": 1,
        "threats": [
            {"id": "surge", "name": "Storm surge", "category": "Natural", "domain": "Physical", "likelihood": 9}
        ],
        "vulnerabilities": [{"id": "low-gen", "name": "Ground-level generation", "class": "Natural"}],
        "pairs": [{"threat_id": "surge", "vulnerability_id": "low-gen", "p_vulnerability": 7, "impact": 9}],
    }


def messages(exc: ValidationError) -> list[str]:
    return [str(f) for f in exc.findings]


def test_minimal_document():
    cat = loads_catalog(json.dumps(minimal_doc()))
    assert (len(cat.threats), len(cat.vulnerabilities), len(cat.pairs)) == (1, 1, 1)
    assert cat.cyber_entries == () and cat.mitigations == () and cat.dependency_graph is None


def test_likelihood_out_of_range_names_threat():
    doc = minimal_doc()
    doc["threats"][0]["likelihood"] = 11
    with pytest.raises(ValidationError) as info:
        loads_catalog(json.dumps(doc))
    assert any(f.entity == "surge" and "likelihood" in f.message for f in info.value.findings)


def test_dangling_vulnerability_reference():
    doc = minimal_doc()
    doc["pairs"][0]["vulnerability_id"] = "flooded-gen"
    with pytest.raises(ValidationError) as info:
        loads_catalog(json.dumps(doc))
    assert any("dangling reference" in m and "flooded-gen" in m for m in messages(info.value))


@pytest.mark.parametrize("name", SAMPLES)
def test_shipped_samples_have_no_findings(name):
    assert validate_catalog(parse_catalog(sample_path(name).read_bytes())) == []


def test_known_vulnerability_discoverability_warning_and_normalization(florida_doc):
    florida_doc["cyber_entries"][0]["dread"]["discoverability"] = 6
    entry_id = florida_doc["cyber_entries"][0]["id"]
    raw = parse_catalog(json.dumps(florida_doc))
    findings = validate_catalog(raw)
    assert [(f.severity, f.entity) for f in findings] == [(Severity.WARNING, entry_id)]
    assert "normalized to 10" in findings[0].message
    assert loads_catalog(json.dumps(florida_doc)).cyber_entry(entry_id).dread.discoverability == 10


def test_mitigation_with_empty_targets(florida_doc):
    florida_doc["mitigations"][0]["targets"] = []
    findings = validate_catalog(parse_catalog(json.dumps(florida_doc)))
    assert any(f.severity is Severity.ERROR and f.entity == "elevate-generation" for f in findings)
    with pytest.raises(ValidationError):
        loads_catalog(json.dumps(florida_doc))


def test_mitigation_dangling_threat_target(florida_doc):
    florida_doc["mitigations"][0]["targets"] = ["threat:meteor"]
    with pytest.raises(ValidationError) as info:
        loads_catalog(json.dumps(florida_doc))
    assert any("meteor" in m for m in messages(info.value))


def test_unknown_fields_rejected():
    doc = minimal_doc()
    doc["threats"][0]["severity"] = 3
    doc["extra"] = True
    with pytest.raises(ValidationError) as info:
        parse_catalog(json.dumps(doc))
    text = " ".join(messages(info.value))
    assert "'severity'" in text and "'extra'" in text


def test_duplicate_keys_and_ids_rejected():
    with pytest.raises(ParseError, match="duplicate key"):
        parse_catalog('{"schema_version": 1, "schema_version": 1}')
    doc = minimal_doc()
    doc["threats"].append(dict(doc["threats"][0]))
    with pytest.raises(ValidationError) as info:
        loads_catalog(json.dumps(doc))
    assert any("duplicate threat id" in m for m in messages(info.value))


def test_schema_version_required():
    doc = minimal_doc()
    doc["schema_version"] = 2
    with pytest.raises(ValidationError):
        parse_catalog(json.dumps(doc))
    del doc["schema_version"]
    with pytest.raises(ValidationError):
        parse_catalog(json.dumps(doc))


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_catalog('{\n  "schema_version": 1,\n  oops\n}')
    assert (info.value.line, info.value.column) == (3, 3)


@pytest.mark.parametrize("text", ["NaN", '{"schema_version": NaN}', "[" * 100000, b"\xff\xfe", ""])
def test_pathological_inputs(text):
    with pytest.raises(GridRiskError):
        loads_catalog(text)


def test_target_parse_round_trip():
    t = Target.parse("surface:WirelessLinks")
    assert t.kind is TargetKind.ATTACK_SURFACE and str(t) == "surface:WirelessLinks"
    with pytest.raises(ValueError):
        Target.parse("zone:coastal")


def test_catalog_lookup_errors(florida):
    with pytest.raises(KeyError):
        florida.threat("meteor")
    assert not florida.has_mitigation("meteor-shield")


@settings(max_examples=200)
@given(st.one_of(st.binary(max_size=200), st.text(max_size=200)))
def test_parser_is_total(data):
    try:
        loads_catalog(data)
    except GridRiskError:
        pass


@settings(max_examples=200)
@given(catalogs(), st.randoms(use_true_random=False))
def test_validation_is_order_independent(cat, rng):
    def shuffled(items):
        items = list(items)
        rng.shuffle(items)
        return tuple(items)

    other = Catalog(
        cat.schema_version, shuffled(cat.threats), shuffled(cat.vulnerabilities), shuffled(cat.pairs),
        shuffled(cat.cyber_entries), shuffled(cat.mitigations), cat.dependency_graph,
    )
    assert validate_catalog(other) == validate_catalog(cat)
    assert catalog_fingerprint(other) == catalog_fingerprint(cat)


@settings(max_examples=100)
@given(catalogs())
def test_generated_catalogs_are_valid(cat):
    assert [f for f in validate_catalog(cat) if f.severity is Severity.ERROR] == []


@settings(max_examples=100)
@given(catalogs())
def test_serialize_round_trip(cat):
    text = dump_catalog(cat)
    again = loads_catalog(text)
    assert again == cat
    assert dump_catalog(again) == text


def test_fingerprint_changes_with_content(florida_doc):
    before = catalog_fingerprint(loads_catalog(json.dumps(florida_doc)))
    florida_doc["pairs"][0]["impact"] = 1
    after = catalog_fingerprint(loads_catalog(json.dumps(florida_doc)))
    assert before.startswith("sha256:") and before != after


@settings(max_examples=100)
@given(quick_catalogs)
def test_seeded_catalogs_are_valid(cat):
    assert [f for f in validate_catalog(cat) if f.severity is Severity.ERROR] == []
    assert loads_catalog(dump_catalog(cat)) == cat
