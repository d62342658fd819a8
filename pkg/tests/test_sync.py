import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcsync.channel import GammaPulse, TabulatedPulse, calibrate_noise
from mcsync.config import ExperimentConfig
from mcsync.harness import simulate_block
from mcsync.metrics import normalized_error
from mcsync.observe import ObservationTrace, SamplingGrid, expected_counts, sample_trace
from mcsync.sync import (MlConfig, PoConfig, TtConfig, ml_log_likelihood, ml_synchronize, po_synchronize,
                         tt_synchronize)
from mcsync.timeline import IntervalSpec, fixed_timeline

from oracles import log_poisson, naive_ml_starts, naive_tt_zones

DT = 1e-5


def _trace(r_b, r_a=None):
    r_b = np.asarray(r_b, dtype=np.int64)
    grid = SamplingGrid(DT, (len(r_b) - 1) * DT)
    return ObservationTrace(np.zeros_like(r_b) if r_a is None else np.asarray(r_a), r_b, grid)


def test_loglik_zero_counts_constant_mean():
    lam, w = 2.5, 7
    flat = TabulatedPulse((0.0, 1.0), (0.0, 0.0), noise=lam)
    tr = _trace(np.zeros(20))
    assert ml_log_likelihood(tr, 3, [], flat, (w - 1) * DT, eps=0) == pytest.approx(-w * lam)


def test_loglik_single_sample():
    flat = TabulatedPulse((0.0, 1.0), (0.0, 0.0), noise=3.0)
    tr = _trace([2, 0, 0])
    want = 2 * math.log(3) - 3 - math.log(2)
    assert want == pytest.approx(-1.4959, abs=1e-4)
    assert ml_log_likelihood(tr, 0, [], flat, 0.5 * DT, eps=0) == pytest.approx(want, rel=1e-12)


def test_matching_hypothesis_scores_higher():
    r = [5, 2, 1]
    right = sum(log_poisson(c, m + 0.1) for c, m in zip(r, [5, 2, 1]))
    shifted = sum(log_poisson(c, m + 0.1) for c, m in zip(r, [1, 5, 2]))
    assert right > shifted


@pytest.mark.parametrize("t_star", [0.8e-3, 0.93e-3, 1.2e-3])
def test_ml_noiseless_limit(t_star, backend):
    spec = IntervalSpec(0.8e-3, 1.2e-3, 2)
    model = GammaPulse(20.0, 1e-4, noise=0.5)
    tl = fixed_timeline([0.0, t_star], [0, 0], spec)
    grid = SamplingGrid.covering(tl, DT)
    ex = expected_counts(tl, (model, model), grid)
    tr = ObservationTrace(np.zeros(grid.n, np.int64), np.rint(ex.rbar_b).astype(np.int64), grid)
    est = ml_synchronize(tr, spec, model, MlConfig(0.8e-3)).starts
    assert est[1] == pytest.approx(t_star, abs=1e-12)


def test_ml_demo_scenario_high_snr():
    cfg = ExperimentConfig.from_dict({"channel": {"snr_b_db": 30, "snr_a_db": 30}})
    tl = fixed_timeline(np.array([0, 1.2, 2, 3, 4.2]) * 1e-3, [1, 1, 0, 0, 1], IntervalSpec(K=5))
    grid = SamplingGrid.covering(tl)
    ex = expected_counts(tl, (cfg.model_a, cfg.model_b), grid)
    hits = 0
    for seed in range(200):
        est = ml_synchronize(sample_trace(ex, seed), tl.spec, cfg.model_b, cfg.ml).starts
        hits += bool(np.all(np.abs(est - tl.starts) <= 2 * DT + 1e-12))
    assert hits >= 190


def test_ml_rejects_long_window():
    with pytest.raises(ValueError):
        MlConfig(t_ow=1e-3).validate(IntervalSpec(0.8e-3, 1.2e-3))


def test_ml_rejects_wide_interval_range():
    with pytest.raises(ValueError):
        MlConfig(t_ow=0.5e-3).validate(IntervalSpec(0.8e-3, 1.7e-3))


def _small_instance(seed):
    rng = np.random.default_rng(seed)
    t_min = rng.integers(15, 25) * DT
    t_max = min(2 * t_min, t_min + rng.integers(0, 15) * DT)
    K = int(rng.integers(2, 5))
    spec = IntervalSpec(t_min, t_max, K)
    model = calibrate_noise(GammaPulse(float(rng.uniform(2, 30)), float(rng.integers(2, 8)) * DT),
                            float(rng.uniform(0, 15)))
    t_ow = float(rng.integers(1, int(round(t_min / DT)) + 1)) * DT
    steps = rng.uniform(t_min, t_max, K - 1)
    tl = fixed_timeline(np.concatenate(([0.0], np.cumsum(steps))), rng.integers(0, 2, K), spec)
    grid = SamplingGrid.covering(tl, DT)
    tr = sample_trace(expected_counts(tl, (model, model), grid), rng.integers(1 << 30))
    return spec, model, t_ow, tr


def test_ml_matches_exhaustive_oracle(backend):
    for seed in range(50):
        spec, model, t_ow, tr = _small_instance(seed)
        assert tr.grid.n <= 200
        est = ml_synchronize(tr, spec, model, MlConfig(t_ow)).starts
        ref = naive_ml_starts(tr.r_b, DT, spec.t_min, spec.t_max, t_ow, spec.K,
                              lambda t: float(model(t)), model.noise)
        assert list(est) == ref, seed


@given(seed=st.integers(0, 10_000), genie=st.booleans())
@settings(max_examples=25, deadline=None)
def test_estimates_stay_in_search_set(seed, genie):
    cfg = ExperimentConfig.from_dict({"run": {"seed": seed}, "interval": {"K": 12}})
    tl, grid, _, tr = simulate_block(cfg, 0)
    spec = cfg.spec
    ml = ml_synchronize(tr, spec, cfg.model_b, MlConfig(spec.t_min, genie), tl.starts).starts
    po = po_synchronize(tr, spec, 1.3e-4, genie, tl.starts).starts
    for est in (ml, po):
        anchor = tl.starts[:-1] if genie else est[:-1]
        d = est[1:] - anchor
        assert np.all(d >= spec.t_min - DT * 1e-6) and np.all(d <= spec.t_max + DT * 1e-6)


def test_genie_needs_truth():
    cfg = ExperimentConfig.from_dict({"interval": {"K": 3}})
    _, _, _, tr = simulate_block(cfg, 0)
    with pytest.raises(ValueError):
        ml_synchronize(tr, cfg.spec, cfg.model_b, MlConfig(0.8e-3, genie=True))
    with pytest.raises(ValueError):
        po_synchronize(tr, cfg.spec, 1e-4, genie=True)


def test_ml_record_has_one_entry_per_estimate():
    cfg = ExperimentConfig.from_dict({"interval": {"K": 4}})
    _, _, _, tr = simulate_block(cfg, 0)
    rec = []
    res = ml_synchronize(tr, cfg.spec, cfg.model_b, cfg.ml, record=rec)
    assert [k for k, _, _ in rec] == [1, 2, 3]
    for k, lo, m in rec:
        assert res.starts[k] == pytest.approx((lo + int(np.argmax(m))) * DT)


def test_ml_error_shrinks_with_snr():
    med = []
    for snr in (5, 10, 30):
        cfg = ExperimentConfig.from_dict({"channel": {"snr_b_db": snr}})
        e = []
        for b in range(60):
            tl, _, _, tr = simulate_block(cfg, b)
            est = ml_synchronize(tr, cfg.spec, cfg.model_b, cfg.ml).starts
            e.append(np.abs(normalized_error(est, tl.starts, cfg.spec)[1:]))
        med.append(np.median(np.concatenate(e)))
    assert med[0] > med[1] > med[2]


def test_po_noiseless_single_pulse():
    model = GammaPulse(20.0, 1e-4)
    spec = IntervalSpec(0.8e-3, 1.2e-3, 2)
    t_star = 1.05e-3
    tl = fixed_timeline([0.0, t_star], [0, 0], spec)
    grid = SamplingGrid.covering(tl, DT)
    ex = expected_counts(tl, (model, model), grid)
    tr = ObservationTrace(np.zeros(grid.n, np.int64), np.rint(100 * ex.rbar_b).astype(np.int64), grid)
    assert po_synchronize(tr, spec, 1e-4).starts[1] == pytest.approx(t_star, abs=1e-12)


def test_po_flat_window_takes_earliest():
    spec = IntervalSpec(0.8e-3, 1.2e-3, 2)
    tr = _trace(np.full(300, 4))
    est = po_synchronize(tr, spec, 1e-4).starts
    assert est[1] == pytest.approx(0.8e-3, abs=1e-12)


def test_po_config_validation():
    with pytest.raises(ValueError):
        PoConfig(0.0)


def test_tt_no_trigger():
    tr = _trace(np.full(50, 3))
    assert tt_synchronize(tr, TtConfig(10, 2 * DT)).zones.shape == (0, 2)


def test_tt_toy_zone(backend):
    tr = _trace([0, 12, 12, 0, 0, 0, 0])
    z = tt_synchronize(tr, TtConfig(10, 2 * DT)).zones
    assert z.tolist() == [[1, 3]]


def test_tt_dwell_extends_zone(backend):
    tr = _trace([0, 12, 0, 0, 0, 15, 0, 0])
    z = tt_synchronize(tr, TtConfig(10, 3 * DT)).zones
    assert z.tolist() == [[1, 4], [5, 7]]


@given(r=st.lists(st.integers(0, 25), min_size=1, max_size=120), xi=st.integers(1, 20),
       n_dw=st.integers(1, 15))
@settings(max_examples=200, deadline=None)
def test_tt_matches_oracle_and_invariants(r, xi, n_dw):
    tr = _trace(r)
    z = tt_synchronize(tr, TtConfig(xi, n_dw * DT)).zones
    assert [tuple(map(int, p)) for p in z] == naive_tt_zones(r, xi, n_dw)
    for i, (a, b) in enumerate(z):
        assert r[a] >= xi
        assert b - a >= n_dw or b == len(r) - 1
        if i:
            assert a > z[i - 1][1]


def test_tt_demo_scenario_five_zones():
    # five symbols, each gets exactly one overlapping zone at this channel's TT-optimal threshold
    cfg = ExperimentConfig.from_dict({})
    tl = fixed_timeline(np.array([0, 1.2, 2, 3, 4.2]) * 1e-3, [1, 1, 0, 0, 1], IntervalSpec(K=5))
    grid = SamplingGrid.covering(tl)
    ex = expected_counts(tl, (cfg.model_a, cfg.model_b), grid)
    ends = np.append(tl.starts[1:], np.inf)
    good = 0
    for seed in range(100):
        zt = tt_synchronize(sample_trace(ex, seed), TtConfig(15, 0.8e-3)).zone_times
        good += len(zt) == 5 and bool(np.all((zt[:, 0] < ends) & (zt[:, 1] >= tl.starts)))
    assert good >= 95


def test_tt_config_validation():
    with pytest.raises(ValueError):
        TtConfig(0)
    with pytest.raises(ValueError):
        TtConfig(10, 1e-3).validate(IntervalSpec(0.8e-3, 1.2e-3))
