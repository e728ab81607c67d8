"""Sweep, report, and fit orchestration."""

import csv
import json
import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from xdp.config import ExperimentConfig
from xdp.experiments import (CriterionReport, run_criterion_report,
                             run_decay_fit, run_distance_sweep)
from xdp.precision import working

HEADER = ["n", "d_squared", "d_squared_times_log_n", "precision_bits", "min_pivot"]


def _cfg(**kw):
    kw.setdefault("poly", "1:1,2:-1")
    kw.setdefault("precision_bits", 128)
    return ExperimentConfig(**kw)


def test_sweep_trivial_polynomial_all_zero(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = _cfg(poly="1:1", r=0, n_schedule=(1, 2, 4), output=str(out))
    rows = run_distance_sweep(cfg)
    assert [row.n for row in rows] == [1, 2, 4]
    assert all(row.d_squared == 0 for row in rows)
    with out.open() as fh:
        data = list(csv.reader(fh))
    assert data[0] == HEADER
    assert len(data) == 4
    assert data[1][1] == "0.0"
    assert data[1][3] == "128"


def test_sweep_pinned_value_and_logn_column():
    cfg = _cfg(r=0, n_schedule=(1, 2))
    rows = run_distance_sweep(cfg)
    with working(128):
        target = (2 + mp.sqrt(2)) / 4
        assert abs(rows[0].d_squared - target) < mpf(10) ** -30
        assert rows[0].d_squared_times_log_n == 0
        assert abs(rows[1].d_squared_times_log_n
                   - rows[1].d_squared * mp.log(2)) < mpf(10) ** -30
    assert all(row.min_pivot > 0 for row in rows)
    assert rows[1].min_pivot <= rows[0].min_pivot


def test_sweep_warm_cache_identical_bytes(tmp_path):
    out = tmp_path / "sweep.csv"
    cache = tmp_path / "cache"
    cfg = _cfg(r=0, n_schedule=(1, 2, 4), output=str(out), cache_dir=str(cache))
    run_distance_sweep(cfg)
    cold = out.read_bytes()
    assert len(list(cache.glob("*.json"))) == 1
    run_distance_sweep(cfg)
    assert out.read_bytes() == cold


def test_sweep_cache_slice_matches_fresh(tmp_path):
    cache = tmp_path / "cache"
    big = _cfg(r=0, n_schedule=(1, 2, 4), cache_dir=str(cache))
    rows_big = run_distance_sweep(big)
    small = _cfg(r=0, n_schedule=(1, 2), cache_dir=str(cache))
    rows_small = run_distance_sweep(small)
    assert len(list(cache.glob("*.json"))) == 1          # sliced, not re-stored
    for a, b in zip(rows_small, rows_big[:2]):
        assert a.n == b.n
        assert a.d_squared == b.d_squared
        assert a.min_pivot == b.min_pivot


def test_sweep_json_output(tmp_path):
    out = tmp_path / "sweep.json"
    cfg = _cfg(r=0, n_schedule=(1,), output=str(out), format="json")
    run_distance_sweep(cfg)
    payload = json.loads(out.read_text())
    assert payload["rows"][0]["n"] == 1
    assert payload["rows"][0]["d_squared"].startswith("0.85355339059327376220")


def test_decay_fit_degenerate_and_negative_slope():
    fit = run_decay_fit(_cfg(poly="1:1", r=0, n_schedule=(1, 2, 4, 8)))
    assert fit.slope == float("-inf")
    assert fit.residual == 0.0

    fit_half = run_decay_fit(_cfg(r=Fraction(1, 2), n_schedule=(1, 2, 4, 8, 16, 32, 64)))
    assert fit_half.slope < 0
    assert fit_half.n_used == (8, 16, 32, 64)
    assert fit_half.residual >= 0.0

    fit_one = run_decay_fit(_cfg(r=1, n_schedule=(1, 2, 4, 8, 16, 32, 64)))
    assert fit_one.slope <= fit_half.slope


def test_report_zeros_present_floor():
    cfg = _cfg(r=-1, n_schedule=(1, 2, 4, 8), rect="-2,1,-20,20", T=20)
    rep = run_criterion_report(cfg)
    assert isinstance(rep, CriterionReport)
    assert rep.verdict == "consistent-zeros-present"
    assert rep.zeros_found.total_count == 5
    assert any("floor" in line for line in rep.evidence)
    with working(128):
        floor = mpf(8) / 9
        assert min(d.d_squared for d in rep.distances) >= floor - mpf(10) ** -9


def test_report_zero_free_cases():
    rep = run_criterion_report(_cfg(poly="1:1", r=0, n_schedule=(1, 2, 4),
                                    rect="-1,1,-2,2", T=5))
    assert rep.verdict == "consistent-zero-free"
    assert rep.C.partial == 0
    assert all(d.d_squared == 0 for d in rep.distances)

    rep_half = run_criterion_report(_cfg(r=Fraction(1, 2),
                                         n_schedule=(1, 2, 4, 8, 16),
                                         rect="-1,1,0.5,40.5", T=40))
    assert rep_half.verdict == "consistent-zero-free"
    assert rep_half.zeros_found.total_count == 4
    assert len(rep_half.C.ordinates) == 0
    assert any("monotone" in line for line in rep_half.evidence)


def test_report_requires_rect_and_height():
    with pytest.raises(ValueError):
        run_criterion_report(_cfg(r=0, n_schedule=(1, 2)))
    with pytest.raises(ValueError):
        run_criterion_report(_cfg(r=0, n_schedule=(1, 2), rect="-1,1,-2,2"))
