"""Slow, loop-based reference implementations used as test oracles.

Written independently of the library code paths: plain Python floats,
math.lgamma, no pulse tables, no ISI truncation, no shared helpers.
"""

import math


def log_poisson(r, lam):
    if lam <= 0:
        return 0.0 if r == 0 else -math.inf
    return r * math.log(lam) - lam - math.lgamma(r + 1)


def naive_ml_starts(r_b, dt, t_min, t_max, t_ow, K, pulse, noise):
    """Exhaustive symbol-by-symbol ML with the first start known to be 0."""
    n = len(r_b)
    est = [0.0]
    est_idx = [0]
    w = int(math.floor(t_ow / dt + 1e-9)) + 1
    for k in range(1, K):
        anchor = est[-1]
        lo = max(0, math.ceil((anchor + t_min) / dt - 1e-9))
        hi = min(n - 1, math.floor((anchor + t_max) / dt + 1e-9))
        hi = max(hi, lo)
        best, best_m = None, -math.inf
        for h in range(lo, hi + 1):
            m = 0.0
            for i in range(h, min(n, h + w)):
                lam = noise
                for j in est_idx + [h]:
                    if i > j:
                        lam += pulse((i - j) * dt)
                m += log_poisson(int(r_b[i]), lam)
            if m > best_m:
                best, best_m = h, m
        est_idx.append(best)
        est.append(best * dt)
    return est


def naive_tt_zones(r, xi, n_dw):
    zones = []
    i = 0
    n = len(r)
    while i < n:
        if r[i] >= xi:
            j = i + 1
            while j < n and r[j] > xi:
                j += 1
            end = min(max(j, i + n_dw), n - 1)
            zones.append((i, end))
            i = end + 1
        else:
            i += 1
    return zones
