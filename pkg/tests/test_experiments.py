import csv
import json
import math

import numpy as np
import pytest

from apptemp import __version__, cli
from apptemp.errors import SchemaViolation, UnknownExperiment
from apptemp.experiments import (
    DEFAULTS,
    PARAMETER_SCHEMAS,
    ExperimentConfig,
    load_config,
    parse_config,
    run_experiment,
)
from apptemp.models import temperature_jump


def _run(experiment, seed=None, **params):
    return run_experiment(parse_config({"experiment": experiment, "parameters": params}, seed))


def _table(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(body))


def _quantities(rec):
    return {r[0]: r[1] for r in rec.rows}


# -- configs ------------------------------------------------------------------

def test_defaults_validate_against_their_schemas():
    assert set(DEFAULTS) == set(PARAMETER_SCHEMAS)
    for name in DEFAULTS:
        cfg = parse_config({"experiment": name})
        assert cfg.parameters == DEFAULTS[name] and cfg.seed == 0


def test_unknown_experiment():
    with pytest.raises(UnknownExperiment):
        parse_config({"experiment": "fig4"})
    with pytest.raises(UnknownExperiment):
        run_experiment(ExperimentConfig("fig4", {}))


def test_schema_messages_name_the_field():
    with pytest.raises(SchemaViolation, match="parameters/omega"):
        parse_config({"experiment": "pair-temperature", "parameters": {"omega": -1}})
    with pytest.raises(SchemaViolation, match="parameters: Additional properties"):
        parse_config({"experiment": "pair-temperature", "parameters": {"omgea": 1}})
    with pytest.raises(SchemaViolation, match="<config>"):
        parse_config({"experiment": "steady-state", "extra": 1})
    with pytest.raises(SchemaViolation):
        parse_config(["not", "a", "mapping"])


def test_beta_grid_bounds():
    with pytest.raises(SchemaViolation):
        parse_config({"experiment": "fig3-curves", "parameters": {"beta_grid": [0.0, 25.0]}})


def test_seed_override(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"experiment": "steady-state", "seed": 3}))
    assert load_config(str(path)).seed == 3
    assert load_config(str(path), seed=11).seed == 11
    with pytest.raises(SchemaViolation):
        load_config(str(path), experiment="fig3-curves")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(SchemaViolation, match="invalid JSON"):
        load_config(str(bad))
    with pytest.raises(SchemaViolation):
        load_config(str(tmp_path / "missing.json"))


def test_hash_depends_on_inputs():
    a = parse_config({"experiment": "steady-state"})
    b = parse_config({"experiment": "steady-state", "seed": 1})
    c = parse_config({"experiment": "steady-state", "parameters": {"beta": 1.0}})
    assert a.sha256 != b.sha256
    assert a.sha256 == c.sha256          # an explicit default is the same config


# -- records -------------------------------------------------------------------

def test_csv_metadata_header():
    rec = _run("temperature-jumps", N=[2, 3])
    text = rec.to_csv()
    header = [ln for ln in text.splitlines() if ln.startswith("#")]
    keys = [ln[2:].split(":", 1)[0] for ln in header]
    for k in ("experiment", "tool", "version", "config_sha256", "config", "tolerances"):
        assert k in keys
    assert f"# version: {__version__}" in header
    assert f"# config_sha256: {rec.config.sha256}" in header
    echo = json.loads(next(ln for ln in header if ln.startswith("# config: "))[len("# config: "):])
    assert echo["parameters"]["kinds"] == ["distinguishable", "indistinguishable"]   # defaults recorded
    rows = _table(text)
    assert rows[0] == rec.columns and len(rows) == 5


def test_floats_have_17_digits():
    rec = _run("temperature-jumps", N=[3], kinds=["distinguishable"])
    row = _table(rec.to_csv())[1]
    assert float(row[4]) == 1 / math.log(2)
    assert row[4] == f"{1 / math.log(2):.17g}"


def test_json_render_roundtrips():
    rec = _run("steady-state")
    obj = json.loads(rec.to_json())
    assert obj["columns"] == ["quantity", "value"]
    assert obj["metadata"]["config_sha256"] == rec.config.sha256
    assert len(obj["rows"]) == len(rec.rows)


# -- generic experiments -------------------------------------------------------

def test_pair_temperature_uncorrelated_is_bath():
    rec = _run("pair-temperature", lam_int=[0.0], beta=[0.5, 2.0, 7.0])
    for lam, beta, c, c_coll, closed, pipe, unc, shift in rec.rows:
        assert c == 0.0
        assert abs(pipe.beta - beta) <= 1e-10 and abs(closed - beta) <= 1e-12
        assert shift == "unchanged"


def test_pair_temperature_negative_correlations_colder():
    rec = _run("pair-temperature", lam_int=[0.1], beta=[1.0, 10.0])
    for row in rec.rows:
        assert row[2] < 0 and row[7] == "colder"


def test_temperature_jumps_table():
    rec = _run("temperature-jumps", N=[2, 3, 4, 5, 6])
    for N, kind, closed, computed, T in rec.rows:
        ref = temperature_jump(N, kind)[0]
        assert closed.as_float() == ref.as_float()
        assert abs(computed.as_float() - ref.as_float()) <= 1e-12
    dist = {r[0]: r[2].as_float() for r in rec.rows if r[1] == "distinguishable"}
    assert dist[4] == pytest.approx(math.log(3), abs=1e-15)


def test_steady_state_dicke_pair():
    q = _quantities(_run("steady-state", beta=1.0))
    w = np.array([1.0, math.exp(-1), math.exp(-2)])
    w /= w.sum()
    assert q["population[psi_0]"] == pytest.approx(w[0], abs=1e-10)
    assert q["population[psi_+]"] == pytest.approx(w[1], abs=1e-10)
    assert q["population[psi_1]"] == pytest.approx(w[2], abs=1e-10)
    assert abs(q["population[psi_-]"]) < 1e-12
    assert q["nullspace_dimension"] == 2


def test_steady_state_dark_fraction_kept():
    q = _quantities(_run("steady-state", beta=2.0, p_minus=0.3))
    assert q["population[psi_-]"] == pytest.approx(0.3, abs=1e-10)


def test_steady_state_qubit_and_mode():
    q = _quantities(_run("steady-state", model="qubit", beta=0.8))
    assert q["population[e]"] == pytest.approx(1 / (1 + math.exp(0.8)), abs=1e-12)
    q = _quantities(_run("steady-state", model="mode", beta=2.0, n_fock=40))
    assert q["energy"] == pytest.approx(1 / math.expm1(2.0), rel=1e-9)


def test_fig3_small_grid():
    rec = _run("fig3-curves", beta_grid=[0.0, 1.0, 10.0], workers=2)
    assert [r[0] for r in rec.rows] == [0.0, 1.0, 10.0]        # grid order regardless of workers
    assert rec.rows[0][3] == pytest.approx(1.0, abs=1e-15)
    assert rec.summary["max_abs_pipeline_difference"] <= 1e-8


# -- CLI -----------------------------------------------------------------------------

def test_cli_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["pair-temperature", "--out", str(a)]) == 0
    assert cli.main(["pair-temperature", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_seed_changes_hash(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["steady-state", "--out", str(a)])
    cli.main(["steady-state", "--seed", "5", "--out", str(b)])
    ha = [ln for ln in a.read_text().splitlines() if ln.startswith("# config_sha256")]
    hb = [ln for ln in b.read_text().splitlines() if ln.startswith("# config_sha256")]
    assert ha != hb


def test_cli_run_subcommand_and_json(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "temperature-jumps", "parameters": {"N": [3]}}))
    assert cli.main(["run", "--config", str(cfg), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["metadata"]["experiment"] == "temperature-jumps"
    assert len(out["rows"]) == 2


def test_cli_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "steady-state", "parameters": {"N": 9}}))
    assert cli.main(["steady-state", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "SchemaViolation" in err and "parameters/N" in err
    cfg.write_text(json.dumps({"experiment": "nope"}))
    assert cli.main(["run", "--config", str(cfg)]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["fig4"])
    assert exc.value.code == 2


def test_cli_truncation_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "phaseonium-equilibration",
                               "parameters": {"rho_bc_re": -0.1, "strict_truncation": True}}))
    assert cli.main(["phaseonium-equilibration", "--config", str(cfg)]) == 4


def test_exit_code_mapping():
    from apptemp.errors import NumericalFailure, TruncationInsufficient

    assert cli.exit_code(SchemaViolation("x")) == 2
    assert cli.exit_code(TruncationInsufficient("x")) == 4
    assert cli.exit_code(NumericalFailure("x")) == 3


def test_cli_schema_subcommand(capsys):
    assert cli.main(["schema", "steady-state"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["defaults"] == DEFAULTS["steady-state"]
