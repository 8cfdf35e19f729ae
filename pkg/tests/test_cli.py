import json
import subprocess
import sys

import pytest

from gridrisk.cli import EXIT_FINDINGS, EXIT_OK, EXIT_USAGE, main
from gridrisk.report import dumps_register_doc, parse_register_doc

from .conftest import GOLDEN, SAMPLES


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


@pytest.mark.parametrize("name", SAMPLES)
def test_validate_samples(capsysbinary, name):
    code, out, err = run(capsysbinary, "validate", f"@{name}")
    assert code == EXIT_OK and out == b"" and "0 errors" in err


def test_validate_reports_findings(tmp_path, capsysbinary, florida_doc):
    florida_doc["pairs"][0]["vulnerability_id"] = "flooded-gen"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(florida_doc))
    code, out, _ = run(capsysbinary, "validate", str(path))
    assert code == EXIT_FINDINGS and b"flooded-gen" in out


def test_quiet_suppresses_summary(capsysbinary):
    for argv in (["-q", "validate", "@florida-coast"], ["validate", "@florida-coast", "--quiet"]):
        code, _, err = run(capsysbinary, *argv)
        assert code == EXIT_OK and err == ""


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["validate", "/nonexistent/catalog.json"], EXIT_USAGE),
        (["validate", "@no-such-sample"], EXIT_USAGE),
        (["frobnicate"], EXIT_USAGE),
        ([], EXIT_USAGE),
        (["dread", "1", "2"], EXIT_USAGE),
        (["dread", "11", "0", "0", "0", "0"], EXIT_USAGE),
        (["prioritize", "@florida-coast", "--w-cost", "-1"], EXIT_USAGE),
        (["propagate", "@florida-coast", "--fail", "water"], EXIT_USAGE),
        (["propagate", "@integrated-energy", "--fail", "moon"], EXIT_USAGE),
        (["--help"], EXIT_OK),
    ],
)
def test_exit_codes(capsysbinary, argv, expected):
    assert run(capsysbinary, *argv)[0] == expected


def test_parse_error_exit(tmp_path, capsysbinary):
    path = tmp_path / "broken.json"
    path.write_text("{")
    code, _, err = run(capsysbinary, "assess", str(path))
    assert code == EXIT_FINDINGS and "parse error" in err


def test_unknown_mitigation_in_plan(tmp_path, capsysbinary):
    plan = tmp_path / "plan.json"
    plan.write_text('{"schema_version": 1, "mitigation_ids": ["moat"]}')
    code, _, err = run(capsysbinary, "whatif", "@florida-coast", str(plan))
    assert code == EXIT_FINDINGS and "moat" in err


def test_dread_inline(capsysbinary):
    code, out, _ = run(capsysbinary, "dread", "2", "5", "5", "10", "10")
    assert code == EXIT_OK
    assert out.decode().splitlines() == [
        "overall: 6.4", "triple: (5, 10, 6)", "exact triple: (5, 10, 6)", "risk score: 300"
    ]


def test_dread_from_catalog(capsysbinary):
    code, out, _ = run(capsysbinary, "dread", "--catalog", "@florida-coast", "--entry", "dos-jamming")
    assert code == EXIT_OK
    assert out.decode().splitlines() == [
        "overall: 7.8", "triple: (6, 10, 8)", "exact triple: (6, 10, 8.5)", "risk score: 480"
    ]


def test_assess_is_idempotent(tmp_path, capsysbinary):
    for fmt, name in (("csv", "register.csv"), ("doc", "register.json"), ("markdown", "summary.md")):
        outputs = []
        for i in range(2):
            d = tmp_path / f"{fmt}{i}"
            assert run(capsysbinary, "assess", "@florida-coast", "--format", fmt, "-o", str(d))[0] == EXIT_OK
            outputs.append((d / name).read_bytes())
        assert outputs[0] == outputs[1]


def test_assess_doc_writes_plot_data(tmp_path, capsysbinary):
    run(capsysbinary, "assess", "@florida-coast", "--format", "doc", "-o", str(tmp_path))
    data = (tmp_path / "register.json").read_bytes()
    assert dumps_register_doc(parse_register_doc(data)) == data
    assert len(json.loads((tmp_path / "radar.json").read_text())) == 3
    assert len(json.loads((tmp_path / "bars.json").read_text())) == 9


def test_assess_with_interdependency(capsysbinary):
    code, out, _ = run(capsysbinary, "assess", "@integrated-energy", "--include-interdependency")
    assert code == EXIT_OK and len(out.decode().splitlines()) == 1 + 3


def test_whatif_out_dir(tmp_path, capsysbinary):
    run(capsysbinary, "whatif", "@florida-coast", "@florida-coast-elevation-plan", "-o", str(tmp_path))
    golden = (GOLDEN / "whatif_florida_elevation.txt").read_bytes()
    assert (tmp_path / "residual.csv").read_bytes() + b"\n" + (tmp_path / "diff.txt").read_bytes() == golden


def test_color_disabled_by_env(tmp_path, florida_doc):
    florida_doc["pairs"][0]["vulnerability_id"] = "flooded-gen"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(florida_doc))
    proc = subprocess.run(
        [sys.executable, "-m", "gridrisk", "validate", str(path)],
        capture_output=True, env={"GRIDRISK_NO_COLOR": "1", "PATH": ""},
    )
    assert proc.returncode == EXIT_FINDINGS and b"\x1b[" not in proc.stdout
