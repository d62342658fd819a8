import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcsync.metrics import (DELETION, INSERTION, OK, BerStats, accumulate_ber, classify_error, histogram,
                            histogram_mode, normalized_error, pair_tt_zones, start_error_stats,
                            wilson_interval, zone_error_stats)
from mcsync.timeline import IntervalSpec

SPEC = IntervalSpec(0.8e-3, 1.2e-3, 5)


def test_normalized_error_examples():
    assert normalized_error(1e-3, 1e-3, SPEC) == 0
    assert normalized_error(1.1e-3, 1.0e-3, SPEC) == pytest.approx(0.1)
    e = normalized_error(0.2e-3, 1.5e-3, SPEC)
    assert e == pytest.approx(-1.3)
    assert classify_error(e) == INSERTION


@pytest.mark.parametrize("e, cls", [(0.4, OK), (1.2, DELETION), (-1.0, OK), (1.0, OK), (-1.01, INSERTION)])
def test_classify(e, cls):
    assert classify_error(e) == cls


@given(st.floats(allow_nan=False))
def test_classify_total(e):
    assert classify_error(e) in (OK, DELETION, INSERTION)


TRUE = np.arange(5) * 1e-3


def test_pairing_bijective():
    zs = TRUE + 0.1e-3
    st_, assign = zone_error_stats(zs, TRUE, SPEC)
    assert assign.tolist() == [0, 1, 2, 3, 4]
    assert st_.deletions == 0 and st_.insertions == 0
    np.testing.assert_allclose(st_.errors, 0.1)


def test_pairing_one_missing_zone():
    st_, assign = zone_error_stats(np.delete(TRUE, 2) + 0.1e-3, TRUE, SPEC)
    assert st_.deletions == 1 and st_.insertions == 0
    assert assign[2] == -1


def test_pairing_one_extra_zone():
    zs = np.sort(np.append(TRUE + 0.1e-3, 2.6e-3))
    st_, _ = zone_error_stats(zs, TRUE, SPEC)
    assert st_.insertions == 1 and st_.deletions == 0


@given(zs=st.lists(st.floats(0, 6e-3), max_size=12), k=st.integers(1, 8))
@settings(max_examples=100, deadline=None)
def test_pairing_accounting(zs, k):
    zs = np.sort(zs)
    ts = np.arange(k) * 1e-3
    st_, assign = zone_error_stats(zs, ts, SPEC)
    paired = int(np.count_nonzero(assign >= 0))
    assert st_.insertions + paired == len(zs)
    assert st_.deletions + paired == k
    used = assign[assign >= 0]
    assert len(set(used.tolist())) == len(used)


def test_pairing_is_greedy_nearest():
    # zone 0 is nearest to interval 1, so interval 0 gets nothing
    assign = pair_tt_zones([0.95e-3], [0.0, 1e-3])
    assert assign.tolist() == [-1, 0]


def test_ber_examples():
    t = np.random.default_rng(0).integers(0, 2, 100)
    assert accumulate_ber(t, t).ber == 0
    assert accumulate_ber(1 - t, t).ber == 1
    d = t.copy()
    d[:3] ^= 1
    s = accumulate_ber(d, t)
    assert (s.errors, s.bits, s.ber) == (3, 100, 0.03)


def test_wilson_interval_values():
    lo, hi = wilson_interval(3, 100)
    # closed form for z = 1.959964
    z = 1.959963984540054
    p, n = 0.03, 100
    c = (p + z * z / (2 * n)) / (1 + z * z / n)
    h = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    assert lo == pytest.approx(c - h, rel=1e-9) and hi == pytest.approx(c + h, rel=1e-9)
    assert BerStats(3, 100).wilson == (lo, hi)


def test_ber_merge():
    assert BerStats(1, 50).merge(BerStats(2, 50)) == BerStats(3, 100)


def test_histogram_zero_spike():
    c, d, n = histogram(np.zeros(40), 0.05)
    assert c.tolist() == [0.0] and n.tolist() == [40]
    assert d[0] == pytest.approx(1 / 0.05)


def test_histogram_bin_edges_centred():
    c, _, n = histogram([-0.025, 0.0249, 0.025, 0.07], 0.05)
    assert dict(zip(np.round(c, 9), n)) == {0.0: 2, 0.05: 2}


def test_histogram_uniform_flat():
    e = np.random.default_rng(1).uniform(0, 1, 200_000)
    c, d, _ = histogram(e, 0.05)
    inner = (c > 0.01) & (c < 0.99)
    assert np.all(np.abs(d[inner] - 1) < 0.05)


def test_histogram_counts_sum_and_asymmetry_kept():
    e = np.r_[np.zeros(10), np.full(3, 0.3)]
    c, d, n = histogram(e)
    assert n.sum() == len(e)
    assert d @ np.full(len(d), 0.05) == pytest.approx(1.0)
    assert histogram_mode(e) == 0.0
    assert c[n > 0].tolist() == pytest.approx([0.0, 0.3])


def test_start_error_stats_skip_anchor():
    est = np.array([0.0, 2.3e-3, 2.0e-3])
    true = np.array([0.0, 1.0e-3, 3.5e-3])
    s = start_error_stats(est, true, SPEC)
    assert s.scored == 2 and s.deletions == 1 and s.insertions == 1
    assert s.fraction_beyond(0.5) == 1.0
