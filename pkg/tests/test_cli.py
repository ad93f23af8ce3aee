"""Scenario loading, CLI subcommands, and output determinism."""

import json
import os

import pytest

from surfcalc.cli import main
from surfcalc.errors import ConfigError
from surfcalc.scenario import load_scenario, run_scenario


def write_scenario(path, **overrides):
    cfg = {
        "name": "tiny",
        "seed": 5,
        "surface": {"name": "expanding-sphere-cap", "params": {"rate": 1.0}},
        "constitutive": {"name": "nonlinear-smooth"},
        "resolutions": [8, 16, 32],
        "t": 0.5,
        "suites": {"identities": {}},
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return str(path)


def test_load_valid_scenario(tmp_path):
    scn = load_scenario(write_scenario(tmp_path / "s.json"))
    assert scn.name == "tiny"
    assert scn.resolutions == [8, 16, 32]
    assert scn.surface().name == "expanding-sphere-cap"


@pytest.mark.parametrize("overrides,field", [
    ({"surface": {"name": "moebius-strip"}}, "surface.name"),
    ({"resolutions": [8, 16]}, "resolutions"),
    ({"resolutions": [32, 16, 8]}, "resolutions"),
    ({"suites": {"astrology": {}}}, "suites.astrology"),
    ({"stencil_order": 3}, "stencil_order"),
    ({"quadrature": "monte-carlo"}, "quadrature"),
    ({"constitutive": {"name": "unknown-set"}}, "constitutive.name"),
    ({"surface": {"name": "flat-disk", "params": {"inner_radius": -1.0}}},
     "surface.params"),
])
def test_config_errors_name_the_field(tmp_path, overrides, field):
    path = write_scenario(tmp_path / "bad.json", **overrides)
    with pytest.raises(ConfigError) as err:
        load_scenario(path)
    assert err.value.field == field


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "nope.json"))
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(str(p))


def test_empty_suite_selection_runs_clean(tmp_path):
    path = write_scenario(tmp_path / "empty.json", suites={})
    rc = main(["run", "--scenario", path, "--out", str(tmp_path / "out")])
    assert rc == 0


def test_cli_run_and_reports(tmp_path):
    path = write_scenario(tmp_path / "s.json",
                          suites={"geometry": {"curvature_reference": -2.0}})
    out = tmp_path / "out"
    rc = main(["run", "--scenario", path, "--out", str(out)])
    assert rc == 0
    files = sorted(os.listdir(out))
    assert "tiny_geometry.csv" in files and "tiny_orders.csv" in files
    header = (out / "tiny_geometry.csv").read_text().splitlines()[0]
    assert header == "name,h,dt,lhs,rhs,abs_residual,rel_residual,observed_order"
    rc = main(["orders", "--report", str(out / "tiny_geometry.csv")])
    assert rc == 0


def test_cli_failure_exit_code(tmp_path):
    # impossible tolerance forces a failed suite and nonzero exit
    path = write_scenario(tmp_path / "s.json",
                          suites={"identities": {"tol_rel": 1e-30}})
    rc = main(["run", "--scenario", path, "--out", str(tmp_path / "out")])
    assert rc == 1


def test_cli_unknown_surface_exit_code(tmp_path):
    path = write_scenario(tmp_path / "s.json",
                          surface={"name": "does-not-exist"})
    rc = main(["run", "--scenario", path, "--out", str(tmp_path / "out")])
    assert rc == 2


def test_cli_list_mentions_catalog(capsys):
    rc = main(["list"])
    assert rc == 0
    text = capsys.readouterr().out
    for name in ("flat-disk", "sphere-cap", "expanding-sphere-cap",
                 "translating-disk", "graph-surface"):
        assert name in text


def test_byte_identical_reruns(tmp_path):
    path = write_scenario(tmp_path / "s.json",
                          suites={"identities": {}, "geometry": {}})
    scn = load_scenario(path)
    run_scenario(scn, str(tmp_path / "a"))
    run_scenario(scn, str(tmp_path / "b"))
    for fname in sorted(os.listdir(tmp_path / "a")):
        a = (tmp_path / "a" / fname).read_bytes()
        b = (tmp_path / "b" / fname).read_bytes()
        assert a == b, fname


def test_threaded_run_matches_serial(tmp_path):
    path = write_scenario(tmp_path / "s.json",
                          suites={"identities": {}, "geometry": {}})
    scn = load_scenario(path)
    run_scenario(scn, str(tmp_path / "serial"), threads=1)
    run_scenario(scn, str(tmp_path / "threaded"), threads=2)
    for fname in sorted(os.listdir(tmp_path / "serial")):
        assert (tmp_path / "serial" / fname).read_bytes() == \
            (tmp_path / "threaded" / fname).read_bytes()


def test_catalog_round_trip(tmp_path):
    """Every catalog surface parses back through the scenario schema."""
    from surfcalc.flowmap import CATALOG

    for name in CATALOG:
        path = write_scenario(tmp_path / f"{name}.json",
                              surface={"name": name}, suites={})
        scn = load_scenario(path)
        assert scn.surface().name == name


def test_identities_fields_from_config(tmp_path):
    path = write_scenario(
        tmp_path / "s.json",
        suites={"identities": {
            "tol_rel": 0.05,  # coarse ladder; the finest level here is 32
            "fields": {"theta": {"name": "linear",
                                 "params": {"a": 0.3, "c": 0.5}}}}})
    scn = load_scenario(path)
    outcomes = run_scenario(scn, str(tmp_path / "out"))
    assert not outcomes[0].failures


def test_threads_env_fallback(tmp_path, monkeypatch, capsys):
    path = write_scenario(tmp_path / "s.json", suites={"geometry": {}})
    monkeypatch.setenv("SURFCALC_THREADS", "2")
    rc = main(["run", "--scenario", path, "--out", str(tmp_path / "out")])
    assert rc == 0


def test_simpson_needs_even_resolutions(tmp_path):
    path = write_scenario(tmp_path / "s.json", quadrature="simpson",
                          resolutions=[9, 18, 36])
    with pytest.raises(ConfigError) as err:
        load_scenario(path)
    assert err.value.field == "resolutions"
