import csv
import io
import json
from fractions import Fraction

import pytest

from valuegap import cli, report
from valuegap.kretschmer import GridFn, write_gridfn
from valuegap.report import ConfigError, Report, ScenarioConfig, render, run, to_document


def gap_report(**params):
    base = {"alpha": "2", "delta": "0", "gamma": "0", "cells": "8"}
    return run(ScenarioConfig.make("kretschmer-gap", {**base, **params}))


def test_kretschmer_gap_report():
    rep = gap_report()
    doc = to_document(rep)
    assert doc["results"]["analytic"] == {"valP": "2/1", "valD": "1/1"}
    assert doc["results"]["discrete"] == {"valP": "2/1", "valD": "1/1"}
    assert doc["results"]["gap"] == "1/1"
    assert all(c["pass"] for c in doc["checks"]) and doc["checks"]
    assert doc["references"]


def test_csv_contains_gap_row():
    rows = list(csv.reader(io.StringIO(render(gap_report(), "csv"))))
    assert ["gap", "1/1"] in rows
    assert all(r[1] == "pass" for r in rows if r[0].startswith("check."))


def test_soc_report():
    doc = to_document(run(ScenarioConfig.make("soc", {"y": "5,3,0"})))
    assert doc["results"]["value"] == "3/1"
    assert doc["results"]["biconjugate"] == "0/1"
    assert doc["results"]["lsc_violated"] is True


def test_pathology_report():
    doc = to_document(run(ScenarioConfig.make("pathology")))
    assert doc["results"]["usc_witness"]["along"] == "0/1"
    assert doc["results"]["usc_witness"]["at_base"] == "-1/1"
    assert doc["results"]["lsc_witness"]["along"] == "-2/1"
    assert doc["results"]["lsc_witness"]["at_base"] == "-1/1"


@pytest.mark.parametrize("scenario", sorted(report.SCENARIOS))
def test_every_scenario_runs_and_round_trips(scenario):
    params = {"samples": 20} if "samples" in report.SCENARIOS[scenario] else {}
    rep = run(ScenarioConfig.make(scenario, params))
    assert not rep.failed
    text = render(rep, "json")
    assert json.loads(text) == to_document(rep)
    assert text == render(run(ScenarioConfig.make(scenario, params)), "json")


def test_empty_checks_render():
    rep = Report("kretschmer", {"alpha": Fraction(2)})
    doc = json.loads(render(rep))
    assert doc["checks"] == [] and doc["parameters"] == {"alpha": "2/1"}
    assert render(rep, "csv").splitlines() == ["scenario,kretschmer"]


def test_json_encodings():
    assert report.jsonable(Fraction(3)) == "3/1"
    assert report.jsonable(1 / 3) == 0.333333333333
    assert report.jsonable(float("inf")) == "+inf"
    from valuegap.extended import NEG_INF
    assert report.jsonable(NEG_INF) == "-inf"


def test_keys_are_sorted():
    text = render(gap_report())
    doc = json.loads(text)
    assert list(doc) == sorted(doc)


@pytest.mark.parametrize("scenario,params,field", [
    ("soc", {"cells": 8}, "cells"),
    ("kretschmer-gap", {"alpha": "x"}, "alpha"),
    ("kretschmer", {"mode": "middle"}, "mode"),
    ("hilbert", {"trunc": "-1"}, "trunc"),
    ("nope", {}, "scenario"),
])
def test_invalid_config_names_the_field(scenario, params, field):
    with pytest.raises(ConfigError) as info:
        ScenarioConfig.make(scenario, params)
    assert info.value.field == field


def test_invalid_tol_and_format():
    with pytest.raises(ConfigError, match="tol"):
        ScenarioConfig.make("soc", tol="-1")
    with pytest.raises(ConfigError, match="format"):
        ScenarioConfig.make("soc", format="xml")


def test_gap_with_misaligned_grid_is_a_usage_error():
    with pytest.raises(ConfigError) as info:
        run(ScenarioConfig.make("kretschmer-gap", {"delta": "1/3", "gamma": "1/2"}))
    assert info.value.field == "cells"


def test_b_file(tmp_path):
    path = tmp_path / "b.csv"
    write_gridfn(GridFn.constant(8), path)
    doc = to_document(run(ScenarioConfig.make("kretschmer", {"b-file": str(path), "alpha": "2"})))
    assert doc["results"]["primal"] == "2/1" and doc["results"]["dual"] == "1/1"
    with pytest.raises(ConfigError, match="b-file"):
        run(ScenarioConfig.make("kretschmer", {"b-file": str(tmp_path / "missing.csv")}))


def test_cli_success(capsys):
    code = cli.main(["--scenario", "kretschmer-gap", "--alpha", "2", "--delta", "0", "--gamma", "0",
                     "--cells", "8", "--format", "csv"])
    assert code == 0
    assert "gap,1/1" in capsys.readouterr().out


def test_cli_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--scenario", "soc", "--cells", "8"])
    assert info.value.code == 2
    assert "--cells" in capsys.readouterr().err


def test_cli_exit_status_reflects_failed_checks(monkeypatch, capsys):
    def failing(rep, p, cfg):
        rep.check("always fails", False, "on purpose")
    monkeypatch.setitem(report.RUNNERS, "pathology", failing)
    assert cli.main(["--scenario", "pathology"]) == 1
    out = capsys.readouterr()
    assert json.loads(out.out)["checks"][0]["pass"] is False
    assert "always fails" in out.err
