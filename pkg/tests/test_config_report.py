import json

import numpy as np
import pytest

from cocycle_lab import config as cfgmod
from cocycle_lab.config import ConfigError, parse_overrides, validate
from cocycle_lab.report import (Report, golden_compare, golden_from_report, merge_reports,
                                strip_timing, write_csv)


def test_defaults_filled():
    cfg = validate("meyer", {"psi": {"catalog": "zn_roots"}})
    assert cfg["p"] == [2, 4] and cfg["seed"] == 0 and cfg["command"] == "meyer"
    assert cfg["tolerances"]["law"] == 1e-8


@pytest.mark.parametrize("command", cfgmod.COMMANDS)
def test_every_command_has_schema_and_defaults(command):
    assert set(cfgmod.DEFAULTS[command]) <= set(cfgmod.SCHEMAS[command])
    for key in cfgmod.REQUIRED[command]:
        with pytest.raises(ConfigError) as info:
            validate(command, {})
        assert info.value.pointer == f"/{key}"


@pytest.mark.parametrize("data,pointer", [
    ({"psi": {}, "extra": 1}, "/extra"),
    ({"psi": {"colour": 1}}, "/psi/colour"),
    ({"psi": {}, "num_samples": 2.5}, "/num_samples"),
    ({"psi": {}, "num_samples": True}, "/num_samples"),
    ({"psi": [1]}, "/psi"),
    ({"psi": {}, "tolerances": {"law": 1, "weird": 2}}, "/tolerances/weird"),
    ({"psi": {}, "command": "fft"}, "/command"),
])
def test_schema_errors_point_at_field(data, pointer):
    with pytest.raises(ConfigError) as info:
        validate("meyer", data)
    assert info.value.pointer == pointer and pointer in str(info.value)


def test_unknown_command():
    with pytest.raises(ConfigError):
        validate("frobnicate", {})


def test_config_not_mutated():
    data = {"psi": {"catalog": "zn_roots"}, "tolerances": {"law": 1e-9}}
    before = json.dumps(data, sort_keys=True)
    cfg = validate("meyer", data)
    cfg["psi"]["catalog"] = "x"
    assert json.dumps(data, sort_keys=True) == before


def test_overrides():
    assert parse_overrides(["law=1e-9", "golden=0.5"]) == {"law": 1e-9, "golden": 0.5}
    for bad in (["law"], ["what=1"], ["law=abc"]):
        with pytest.raises(ConfigError):
            parse_overrides(bad)


def test_report_plain_values():
    rep = Report("x", {})
    rep.value("arr", np.array([1.0, np.nan]))
    rep.value("flag", np.bool_(True))
    rep.value("z", complex(1, 2))
    rep.check("ok", np.bool_(True), np.float64(3.0))
    doc = json.loads(rep.dumps())
    assert doc["values"]["arr"]["value"] == [1.0, None]
    assert doc["values"]["flag"]["value"] is True and doc["values"]["z"]["value"] == [1, 2]
    assert doc["passed"]


def test_report_fails_on_golden_drift():
    rep = Report("x", {})
    rep.check("ok", True)
    rep.golden = {"passed": False, "failures": [], "compared": 1}
    assert not rep.passed


def test_golden_compare_tolerances():
    report = {"command": "x", "values": {"a": {"value": 1.0, "tol": 1e-6},
                                         "b": {"value": [1.0, 2.0], "tol": 1e-3},
                                         "c": {"value": "text", "tol": None}}}
    golden = golden_from_report(report)
    assert golden_compare(report, golden)["compared"] == 3

    golden["fields"]["a"]["value"] = 1.0 + 2e-6
    golden["fields"]["b"]["value"] = [1.0, 2.0005]
    res = golden_compare(report, golden)
    assert [f["field"] for f in res["failures"]] == ["a"]
    assert golden_compare(report, golden, overrides={"a": 1e-5})["passed"]
    golden["fields"]["b"]["value"] = [1.0]
    assert not golden_compare(report, golden, overrides={"a": 1e-5})["passed"]


def test_golden_default_tolerance():
    report = {"values": {"a": {"value": 1.0, "tol": None}}}
    golden = {"fields": {"a": {"value": 1.0 + 5e-7, "tol": None}}}
    assert golden_compare(report, golden)["passed"]
    assert not golden_compare(report, golden, default_tol=1e-7)["passed"]


def test_merge_reports():
    a = {"command": "p", "passed": True, "checks": [{"name": "c", "passed": True}],
         "values": {"v": {"value": 1}}}
    b = {"command": "q", "passed": False, "checks": [], "values": {}}
    m = merge_reports([a, b])
    assert not m["passed"] and m["checks"][0]["name"] == "0:p/c" and "0:p/v" in m["values"]
    assert merge_reports([a])["passed"]


def test_csv_and_timing(tmp_path):
    write_csv(tmp_path / "t.csv", [{"a": 1, "b": 2.5}])
    assert (tmp_path / "t.csv").read_text().splitlines() == ["a,b", "1,2.5"]
    write_csv(tmp_path / "e.csv", [])
    assert (tmp_path / "e.csv").read_text() == ""
    assert strip_timing({"timing": 1, "x": 2}) == {"x": 2}
