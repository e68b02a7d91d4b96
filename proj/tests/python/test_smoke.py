import math

import pytest
import yaml

import homog_lab as hl


def config(kind, **blocks):
    cfg = yaml.safe_load(hl.emit_defaults(kind))
    for block, values in blocks.items():
        if isinstance(values, dict):
            cfg[block].update(values)
        else:
            cfg[block] = values
    return yaml.safe_dump(cfg, sort_keys=False)


def test_kinds_and_defaults():
    kinds = hl.experiment_kinds()
    assert "full_pipeline" in kinds
    for kind in kinds:
        text = hl.emit_defaults(kind)
        assert hl.canonical_config(text) == text
        assert len(hl.config_hash(text)) == 16


def test_config_errors():
    with pytest.raises(hl.ConfigError, match="drift_maximum"):
        hl.canonical_config(config("validate_env", environment={"drift_maximum": 0.1}))
    with pytest.raises(ValueError):
        hl.emit_defaults("no_such_kind")


def test_hash_tracks_seed():
    a = config("validate_env", seed=1)
    b = config("validate_env", seed=2)
    assert hl.config_hash(a) != hl.config_hash(b)
    assert hl.config_hash(a) == hl.config_hash(config("validate_env", seed=1))


def test_validation_report():
    good = hl.validate(hl.emit_defaults("validate_env"))
    assert all(h["pass"] for h in good)
    bad = hl.validate(config("validate_env", environment={"drift_max": 2.5}))
    assert not next(h for h in bad if h["name"] == "drift_bound")["pass"]


def test_environment_ranges():
    text = config(
        "validate_env",
        environment={"ellipticity": 0.8, "diffusion_max": 1.2, "growth_min": 0.6, "growth_max": 1.4},
    )
    for k in range(20):
        c = hl.evaluate(text, 0.3 * k, 0.7 * k, -0.2 * k)
        assert 0.8 <= c["diffusion"][0] <= 1.2
        assert 0.6 <= c["growth"] <= 1.4


def test_constant_flow_speed_table():
    text = config(
        "speed_table",
        environment={"mode": "geq", "mean_flow": [0.5, 0.0]},
        solver={"h": 0.25, "margin": 3},
        speed_table={"directions": 4, "radius": 16, "samples": 2},
    )
    t = hl.speed_table(text)
    assert len(t["w"]) == 4
    assert t["w"][0] == pytest.approx(1.5, rel=0.05)
    assert t["w"][2] == pytest.approx(0.5, rel=0.05)


def test_run_writes_summary(tmp_path):
    text = config("subadd_synthetic", subadd={"samples": 50})
    res = hl.run(text, str(tmp_path), seed=4)
    assert res["exit_code"] == 0
    assert (tmp_path / "summary.csv").exists()
    assert all(c["pass"] for c in res["checks"])
    again = hl.run(text, str(tmp_path / "again"), seed=4)
    assert (tmp_path / "summary.csv").read_bytes() == (tmp_path / "again" / "summary.csv").read_bytes()


def test_wilson_interval():
    lo, hi = hl.wilson_interval(45, 50)
    assert lo == pytest.approx(0.7864, rel=1e-3)
    assert hi > 0.9
    assert not math.isnan(hl.wilson_interval(0, 0)[1])
