import json

import pytest

from renormqp import errors
from renormqp.config import GOLDEN_MEAN, DiscDomain, RenormConfig, load_config


def test_defaults():
    cfg = RenormConfig()
    assert cfg.disc == DiscDomain(0.2, 1.5)
    assert cfg.m_nodes == 4 * cfg.n_x + 16
    assert cfg.omega == pytest.approx(0.6180339887498949)
    assert cfg.interval == (-1.1, 1.1)


def test_with_recomputes_nodes():
    assert RenormConfig().with_(n_x=60).m_nodes == 256


@pytest.mark.parametrize(
    "kw",
    [
        {"n_x": 3},
        {"m_nodes": 10},
        {"tol_newton": 0.0},
        {"omega": 1.0},
        {"disc": DiscDomain(0.2, 1.0)},
        {"delta": 0.7},
        {"curve_nodes": 7},
    ],
)
def test_invalid_configs(kw):
    with pytest.raises(errors.ConfigError):
        RenormConfig(**kw)


def test_disc_radius_positive():
    with pytest.raises(errors.ConfigError):
        DiscDomain(0.0, -1.0)


def test_round_trip_through_json(tmp_path):
    cfg = RenormConfig(n_x=30, omega=0.25)
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert load_config(p) == cfg


def test_malformed_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "n_x": 40,\n  "delta" 0.1\n}')
    with pytest.raises(errors.ConfigError, match="line 3"):
        load_config(p)


def test_unknown_key(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"nx": 40}')
    with pytest.raises(errors.ConfigError, match="unknown"):
        load_config(p)


def test_config_is_hashable():
    assert hash(RenormConfig()) == hash(RenormConfig())


def test_golden_mean():
    assert GOLDEN_MEAN**2 + GOLDEN_MEAN == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "cls, code",
    [
        (errors.RenormError, 1),
        (errors.NoConvergence, 2),
        (errors.PeriodMismatch, 2),
        (errors.RootLost, 2),
        (errors.DomainError, 3),
        (errors.ImageEscape, 3),
        (errors.DegenerateExtremum, 3),
        (errors.ConfigError, 4),
        (errors.MissingArtifact, 5),
        (errors.VerificationFailed, 6),
    ],
)
def test_exit_codes(cls, code):
    assert cls.exit_code == code


def test_not_renormalizable_records_step():
    e = errors.NotRenormalizable(3, "b' too small")
    assert e.step == 3 and "3" in str(e)
