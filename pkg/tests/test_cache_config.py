"""Gram cache persistence and experiment configuration."""

import json
import os
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from xdp.cache import cache_gc, cache_path, load_gram, store_gram
from xdp.config import (DEFAULT_SCHEDULE, ExperimentConfig, config_from_json,
                        geometric_schedule, parse_rect, parse_schedule)
from xdp.distance import _build_gram
from xdp.dpcore import DirichletPolynomial
from xdp.precision import working
from xdp.zeros import Rectangle

P_BASE = DirichletPolynomial.parse("1:1,2:-1")


def _build(n, bits=128):
    return _build_gram(P_BASE, 0, n, bits)


def test_store_load_roundtrip(tmp_path):
    G, g = _build(3)
    path = store_gram(tmp_path, P_BASE, 0, 128, 3, G, g, 128)
    assert path.exists()
    payload = json.loads(path.read_text())
    assert payload["version"] == 1
    assert payload["poly"] == "1:1,2:-1"
    assert payload["r"] == "0"
    assert payload["n"] == 3
    assert payload["precision_bits"] == 128
    assert isinstance(payload["G"][0][0][0], str)

    loaded = load_gram(tmp_path, P_BASE, 0, 128, n_min=2)
    assert loaded is not None
    assert loaded.n == 3
    assert loaded.precision_bits == 128
    with working(128):
        for i in range(3):
            assert loaded.g[i] == g[i]
            for j in range(3):
                assert loaded.G[i][j] == G[i][j]


def test_load_misses(tmp_path):
    assert load_gram(tmp_path, P_BASE, 0, 128, n_min=1) is None
    G, g = _build(2)
    store_gram(tmp_path, P_BASE, 0, 128, 2, G, g, 128)
    # stored n too small for the request
    assert load_gram(tmp_path, P_BASE, 0, 128, n_min=3) is None
    # key differs in r and in precision
    assert load_gram(tmp_path, P_BASE, Fraction(1, 2), 128, n_min=1) is None
    assert load_gram(tmp_path, P_BASE, 0, 256, n_min=1) is None
    assert load_gram(tmp_path, P_BASE, 0, 128, n_min=2) is not None


def test_load_touches_mtime_and_tolerates_corruption(tmp_path):
    G, g = _build(2)
    path = store_gram(tmp_path, P_BASE, 0, 128, 2, G, g, 128)
    os.utime(path, (1_000_000, 1_000_000))
    assert load_gram(tmp_path, P_BASE, 0, 128, n_min=1) is not None
    assert path.stat().st_mtime > 1_000_000

    path.write_text("{ not json")
    assert load_gram(tmp_path, P_BASE, 0, 128, n_min=1) is None


def test_key_separates_polynomials(tmp_path):
    other = DirichletPolynomial.parse("1:1,3:-1")
    assert cache_path(tmp_path, P_BASE, 0, 128) != cache_path(tmp_path, other, 0, 128)
    assert cache_path(tmp_path, P_BASE, 0, 128) == cache_path(
        tmp_path, DirichletPolynomial.parse("1:1,2:-1"), Fraction(0), 128)


def test_cache_gc(tmp_path):
    assert cache_gc(tmp_path, 10_000) == 0
    G, g = _build(2)
    p_old = store_gram(tmp_path, P_BASE, 0, 128, 2, G, g, 128)
    p_new = store_gram(tmp_path, P_BASE, Fraction(1, 2), 128, 2,
                       *_build_pair_for_r_half(), 128)
    os.utime(p_old, (1_000_000, 1_000_000))
    limit = p_new.stat().st_size + 1
    assert cache_gc(tmp_path, limit) == 1
    assert p_new.exists() and not p_old.exists()
    assert cache_gc(tmp_path, limit) == 0


def _build_pair_for_r_half():
    return _build_gram(P_BASE, Fraction(1, 2), 2, 128)


def test_config_defaults_and_validation():
    cfg = ExperimentConfig(poly="1:1,2:-1")
    assert cfg.n_schedule == DEFAULT_SCHEDULE == (1, 2, 4, 8, 16, 32, 64, 128, 256)
    assert cfg.precision_bits == 256
    assert cfg.r == Fraction(0)
    assert cfg.format == "csv"

    with pytest.raises(ValueError):
        ExperimentConfig(poly="1:1", n_schedule=(1, 2, 2))
    with pytest.raises(ValueError):
        ExperimentConfig(poly="1:1", n_schedule=(2, 1))
    with pytest.raises(ValueError):
        ExperimentConfig(poly="1:1", n_schedule=(0, 1))
    with pytest.raises(ValueError):
        ExperimentConfig(poly="1:1", precision_bits=32)
    with pytest.raises(ValueError):
        ExperimentConfig(poly="1:1", format="xml")
    with pytest.raises(ValueError):
        ExperimentConfig(poly="")


def test_schedule_and_rect_parsing():
    assert parse_schedule("1,2,4") == (1, 2, 4)
    assert parse_schedule(" 3 , 9 ") == (3, 9)
    with pytest.raises(ValueError):
        parse_schedule("4,2")
    with pytest.raises(ValueError):
        parse_schedule("")

    assert geometric_schedule(256) == DEFAULT_SCHEDULE
    assert geometric_schedule(100) == (1, 2, 4, 8, 16, 32, 64, 100)
    assert geometric_schedule(1) == (1,)
    with pytest.raises(ValueError):
        geometric_schedule(0)

    rect = parse_rect("-1,1,0.5,100.5")
    assert rect == Rectangle(-1, 1, Fraction(1, 2), Fraction(201, 2))
    with pytest.raises(ValueError):
        parse_rect("1,2,3")
    with pytest.raises(ValueError):
        parse_rect("1,0,0,1")


def test_config_from_json_and_overrides():
    obj = {"poly": "1:1,2:-1", "r": "1/2", "schedule": [1, 2, 4],
           "precision_bits": 128, "rect": "-1,1,0,2", "T": 25,
           "output": "out.csv", "format": "csv", "cache_dir": "/tmp/c"}
    cfg = config_from_json(obj)
    assert cfg.r == Fraction(1, 2)
    assert cfg.n_schedule == (1, 2, 4)
    assert cfg.precision_bits == 128
    assert cfg.rect == Rectangle(-1, 1, 0, 2)
    assert cfg.T == Fraction(25)
    assert cfg.cache_dir == "/tmp/c"

    merged = config_from_json(obj, overrides={"r": "0", "schedule": "1,8"})
    assert merged.r == Fraction(0)
    assert merged.n_schedule == (1, 8)
    assert merged.precision_bits == 128

    with pytest.raises(ValueError):
        config_from_json({"poly": "1:1", "format": "yaml"})
    with pytest.raises(ValueError):
        config_from_json({"poly": "1:1", "unknown_key": 1})
