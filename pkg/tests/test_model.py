import json

import numpy as np
import pytest

from seastab.model import (
    CouplingParams,
    SeaConfig,
    ValidationError,
    compute_constraint_T,
    compute_m3,
    compute_m5,
    default_a_max,
    denormalize_gauge,
    load_config,
    normalize_gauge,
)

PI5 = np.pi**5


def brute_m3(cfg):
    total = 0.0
    for ma, ra in zip(cfg.masses, cfg.weights):
        for mb, rb in zip(cfg.masses, cfg.weights):
            total += ra * rb * (ma**3 + mb**3)
    return -total / (64.0 * PI5)


def brute_m5(cfg):
    total = 0.0
    for ma, ra in zip(cfg.masses, cfg.weights):
        for mb, rb in zip(cfg.masses, cfg.weights):
            total += ra * rb * (ma - mb) ** 2 * (ma + mb) ** 3
    return total / (512.0 * PI5)


def test_m3_single_generation():
    cfg = SeaConfig(masses=(1.0,), weights=(1.0,))
    assert compute_m3(cfg) == pytest.approx(-1.0 / (32.0 * PI5), rel=1e-14)
    assert compute_m3(cfg) == pytest.approx(-1.02124e-4, rel=1e-4)


def test_m3_zero_weight():
    cfg = SeaConfig(masses=(1.0,), weights=(0.0,))
    assert compute_m3(cfg) == 0.0


def test_m3_two_generations_hand_sum():
    cfg = SeaConfig(masses=(1.0, 2.0), weights=(1.0, 1.0))
    expected = -36.0 / (64.0 * PI5)  # 2*1 + 2*8 + 2*(1+8) over ordered pairs
    assert compute_m3(cfg) == pytest.approx(expected, rel=1e-14)
    assert compute_m3(cfg) == pytest.approx(brute_m3(cfg), rel=1e-14)


def test_m5_examples():
    assert compute_m5(SeaConfig((1.0,), (1.0,))) == 0.0
    cfg = SeaConfig((1.0, 2.0), (1.0, 1.0))
    assert compute_m5(cfg) == pytest.approx(54.0 / (512.0 * PI5), rel=1e-14)
    assert compute_m5(cfg) == pytest.approx(brute_m5(cfg), rel=1e-14)
    assert compute_m5(SeaConfig((1.0, 2.0), (1.0, 0.0))) == 0.0


def test_constraint_examples():
    assert compute_constraint_T(SeaConfig((1.0,), (1.0,))) == pytest.approx(1.0)
    assert compute_constraint_T(SeaConfig((1.0, 2.0), (1.0, 0.5))) == pytest.approx(5.0)
    assert compute_constraint_T(SeaConfig((1.0,), (0.0,))) == 0.0


def test_sign_properties_randomized():
    rng = np.random.default_rng(7)
    for _ in range(200):
        g = rng.integers(1, 5)
        masses = tuple(np.sort(rng.uniform(0.1, 10.0, g)))
        weights = tuple(rng.uniform(0.0, 5.0, g))
        cfg = SeaConfig(masses, weights)
        assert compute_m3(cfg) <= 0.0
        assert compute_m5(cfg) >= -1e-300
        assert compute_m3(cfg) == pytest.approx(brute_m3(cfg), rel=1e-12, abs=1e-18)
        assert compute_m5(cfg) == pytest.approx(brute_m5(cfg), rel=1e-12, abs=1e-18)


def test_weight_and_mass_homogeneity():
    rng = np.random.default_rng(11)
    cfg = SeaConfig(tuple(np.sort(rng.uniform(0.5, 3.0, 3))), tuple(rng.uniform(0.1, 2.0, 3)))
    lam = 1.7
    scaled_w = cfg.replace(weights=tuple(lam * w for w in cfg.weights))
    assert compute_m3(scaled_w) == pytest.approx(lam**2 * compute_m3(cfg), rel=1e-13)
    assert compute_m5(scaled_w) == pytest.approx(lam**2 * compute_m5(cfg), rel=1e-13)
    assert compute_constraint_T(scaled_w) == pytest.approx(lam * compute_constraint_T(cfg), rel=1e-13)
    scaled_m = cfg.replace(masses=tuple(lam * m for m in cfg.masses))
    assert compute_constraint_T(scaled_m) == pytest.approx(lam**3 * compute_constraint_T(cfg), rel=1e-13)
    assert compute_m3(scaled_m) == pytest.approx(lam**3 * compute_m3(cfg), rel=1e-13)
    assert compute_m5(scaled_m) == pytest.approx(lam**5 * compute_m5(cfg), rel=1e-13)


def test_gauge_normalization():
    cfg = SeaConfig((2.0, 4.0), (3.0, 1.0))
    normed, lam, mu = normalize_gauge(cfg)
    assert normed.masses == (1.0, 2.0)
    assert normed.weights == pytest.approx((1.0, 1.0 / 3.0))
    assert (lam, mu) == (2.0, 3.0)
    back = denormalize_gauge(normed, lam, mu)
    assert back.masses == pytest.approx(cfg.masses, rel=1e-15)
    assert back.weights == pytest.approx(cfg.weights, rel=1e-15)


def test_gauge_identity_and_failure():
    cfg = SeaConfig((1.0, 3.0), (1.0, 0.2))
    normed, lam, mu = normalize_gauge(cfg)
    assert normed == cfg and lam == 1.0 and mu == 1.0
    with pytest.raises(ValidationError):
        normalize_gauge(SeaConfig((1.0,), (0.0,)))


def test_validation_names_keys():
    with pytest.raises(ValidationError) as err:
        SeaConfig((1.0, -2.0), (1.0, 1.0))
    assert "masses[1]" in str(err.value)
    with pytest.raises(ValidationError) as err:
        SeaConfig((1.0, 2.0), (1.0, -0.5))
    assert "weights[1]" in str(err.value)
    with pytest.raises(ValidationError) as err:
        SeaConfig((2.0, 1.0), (1.0, 1.0))
    assert "masses[1]" in str(err.value)


def test_equal_masses_accepted():
    cfg = SeaConfig((1.0, 1.0), (0.5, 0.5))
    assert compute_m5(cfg) == 0.0


def test_load_config_roundtrip(tmp_path):
    doc = {
        "masses": [1.0, 2.0],
        "weights": [1.0, 0.5],
        "c1": 3.0,
        "a_max": 9.5,
        "quad_tol": 1e-9,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    loaded = load_config(path)
    assert loaded.cfg.masses == (1.0, 2.0)
    assert loaded.params.c1 == 3.0
    assert loaded.params.a_max == 9.5
    assert loaded.quad.quad_tol == 1e-9
    assert "c0" in loaded.defaults_applied
    assert "a_max" not in loaded.defaults_applied


def test_load_config_defaults_a_max():
    loaded = load_config({"masses": [1.0, 2.0], "weights": [1.0, 1.0]})
    assert loaded.params.a_max == pytest.approx(default_a_max(loaded.cfg))
    assert loaded.defaults_applied["a_max"] == pytest.approx(6.0)


def test_load_config_bad_keys():
    with pytest.raises(ValidationError) as err:
        load_config({"masses": [1.0], "weights": [1.0], "a_max": "big"})
    assert err.value.key == "a_max"
    with pytest.raises(ValidationError) as err:
        load_config({"masses": [1.0], "weights": [1.0], "bogus": 1})
    assert err.value.key == "bogus"
    with pytest.raises(ValidationError) as err:
        load_config({"weights": [1.0]})
    assert err.value.key == "masses"
    with pytest.raises(ValidationError) as err:
        load_config({"masses": [1.0, "x"], "weights": [1.0, 1.0]})
    assert err.value.key == "masses[1]"


def test_a_max_must_clear_masses():
    cfg = SeaConfig((1.0, 2.0), (1.0, 1.0))
    with pytest.raises(ValidationError):
        CouplingParams(a_max=3.9).validate_against(cfg)
