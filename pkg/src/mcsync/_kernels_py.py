"""Pure numpy versions of the compiled kernels."""

import numpy as np


def ml_scan(r, lnfact, base, pulse, h_lo, h_hi):
    """Poisson log-likelihood of every hypothesis ``h`` in ``[h_lo, h_hi]``.

    Hypothesis ``h`` explains samples ``h .. h+W-1`` (clipped at the trace end)
    with mean ``base[h+m] + pulse[m]``. Returns the earliest maximizer and
    the metric of every hypothesis. A zero mean with a positive count makes
    the hypothesis impossible (-inf).
    """
    n, w = len(r), len(pulse)
    hs = np.arange(h_lo, h_hi + 1)
    idx = hs[:, None] + np.arange(w)[None, :]
    valid = idx < n
    idx = np.minimum(idx, n - 1)
    lam = base[idx] + pulse[None, :]
    rr = r[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, rr * np.log(np.where(lam > 0, lam, 1.0)) - lam - lnfact[idx],
                         np.where(rr > 0, -np.inf, 0.0))
    terms = np.where(valid, terms, 0.0)
    metrics = terms.sum(axis=1)
    if len(metrics) == 0 or not np.any(metrics > -np.inf):
        return -1, metrics
    return int(h_lo + np.argmax(metrics)), metrics


def tt_scan(r, xi, n_dw):
    """Detection zones ``(start, end)`` as inclusive sample indices."""
    n = len(r)
    above = np.flatnonzero(r >= xi)
    below = np.flatnonzero(r <= xi)
    zones = []
    pos = 0
    while pos < n:
        i = np.searchsorted(above, pos)
        if i == len(above):
            break
        start = int(above[i])
        j = np.searchsorted(below, start + 1)
        end = int(below[j]) if j < len(below) else n - 1
        end = min(max(end, start + n_dw), n - 1)
        zones.append((start, end))
        pos = end + 1
    return np.array(zones, dtype=np.int64).reshape(-1, 2)
