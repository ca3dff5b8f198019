import json

import numpy as np
import pytest

from vegahedge import ConfigError, load_config, parse_config


def base_config():
    return {
        "model": {
            "xi": 0.3, "rho": -0.7, "kappa_p": 2.0, "theta_p": 0.04,
            "kappa_q": 2.0, "theta_q": 0.04, "mu": 0.1, "s0": 100.0, "nu0": 0.04,
        },
        "options": [
            {"strike": 100.0, "maturity": 1.0, "kind": "call"},
            {"strike": 110.0, "maturity": 0.5, "kind": "put"},
        ],
        "book": {"vega_mm": [10.0, -4.0]},
        "hedge": {
            "gamma": 2.0, "horizon": 0.25, "q0": [0.0, 0.0],
            "costs": [
                {"variant": "quadratic", "eta": 1.0},
                {"variant": "power", "eta": 0.5, "k": 1.5},
            ],
            "problem": "bucket_cancellation",
        },
        "run": {"grid": 128, "seed": 5},
    }


def test_parse_round_trip(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(base_config()))
    cfg = load_config(path)
    assert cfg.params.xi == 0.3
    assert cfg.state.s0 == 100.0
    assert len(cfg.options) == 2 and cfg.options[1].kind == "put"
    np.testing.assert_array_equal(cfg.book.vega_mm, [10.0, -4.0])
    assert cfg.problem == "bucket_cancellation"
    assert cfg.run.grid == 128 and cfg.run.seed == 5
    assert cfg.run.n_paths == 100_000  # default preserved
    assert cfg.view_override is None
    assert cfg.costs[1].k == 1.5


def test_view_override():
    raw = base_config()
    raw["view_override"] = {"sharpe": 0.4, "zeta": -0.2}
    cfg = parse_config(raw)
    assert cfg.view_override.sharpe == 0.4
    assert cfg.view_override.zeta == -0.2


def test_unknown_fields_rejected():
    raw = base_config()
    raw["modle"] = {}
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config(raw)
    raw = base_config()
    raw["model"]["vol_of_vol"] = 1.0
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config(raw)
    raw = base_config()
    raw["hedge"]["costs"][0]["exponent"] = 2.0
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config(raw)


def test_missing_fields_rejected():
    raw = base_config()
    del raw["model"]["nu0"]
    with pytest.raises(ConfigError, match="missing field"):
        parse_config(raw)
    raw = base_config()
    del raw["hedge"]["problem"]
    with pytest.raises(ConfigError, match="missing field"):
        parse_config(raw)


def test_length_mismatch_rejected():
    raw = base_config()
    raw["hedge"]["q0"] = [0.0]
    with pytest.raises(ConfigError, match="share one length"):
        parse_config(raw)


def test_bad_values_rejected():
    raw = base_config()
    raw["hedge"]["costs"][0] = {"variant": "power", "eta": 1.0}
    with pytest.raises(ConfigError, match="exponent"):
        parse_config(raw)
    raw = base_config()
    raw["model"]["nu0"] = -0.1
    with pytest.raises(ConfigError):
        parse_config(raw)
    raw = base_config()
    raw["run"]["grid"] = 12.5
    with pytest.raises(ConfigError, match="integer"):
        parse_config(raw)
    raw = base_config()
    raw["options"][0]["kind"] = "straddle"
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        load_config(bad)
