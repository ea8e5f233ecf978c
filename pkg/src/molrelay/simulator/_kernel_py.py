"""Vectorised pure-numpy simulation kernel.

Fallback used when the compiled extension is unavailable (and reference
for its correctness tests).  Both kernels consume the same counter-based
draw layout and apply the same arithmetic in the same order, so they
produce identical error counts for identical (scenario, seed, range).

Per-trial draw layout (trial k owns draw indices k*m .. k*m + m - 1):

    two-phase:  [bernoulli, relay noise 0..nb-1, destination noise 0..nb-1]
    broadcast:  [bernoulli, node noise 0..nb-1]
    direct:     [bernoulli, noise]
"""

from __future__ import annotations

import numpy as np

from .rng import normal_stream, uniform_stream

KIND_TWO_PHASE = 0
KIND_BROADCAST = 1
KIND_DIRECT = 2


def _logaddexp2way(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """log(exp(a) + exp(b)) with the same max-shift form as the C kernel."""
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(invalid="ignore"):  # (-inf) - (-inf) below, masked out
        out = hi + np.log1p(np.exp(lo - hi))
    return np.where(np.isneginf(hi), hi, out)


def chain_counts(scn, seed: int, start: int, n: int) -> tuple[int, int, int]:
    """Simulate trials [start, start+n); return error/agreement counts.

    Returns (errors_linear, errors_exact, agreement_count).  For direct
    scenarios the two detectors are the same test.
    """
    draws = np.uint64(scn.draws_per_trial)
    base = (np.uint64(start) + np.arange(n, dtype=np.uint64)) * draws
    x0 = uniform_stream(seed, base) < scn.prior_one

    if scn.kind == KIND_DIRECT:
        z = normal_stream(seed, base + np.uint64(1))
        c = np.where(x0, scn.relay_signal[0], 0.0) + scn.relay_mu[0] + scn.relay_sigma[0] * z
        decision = scn.relay_scale[0] * c > scn.relay_threshold[0]
        errors = int(np.count_nonzero(decision != x0))
        return errors, errors, n

    nb = len(scn.dest_signal)
    statistic = np.zeros(n)
    llr = np.zeros(n)
    for i in range(nb):
        if scn.kind == KIND_TWO_PHASE:
            z = normal_stream(seed, base + np.uint64(1 + i))
            c = np.where(x0, scn.relay_signal[i], 0.0) + scn.relay_mu[i] + scn.relay_sigma[i] * z
            xhat = scn.relay_scale[i] * c > scn.relay_threshold[i]
            zt = normal_stream(seed, base + np.uint64(1 + nb + i))
        else:
            xhat = x0
            zt = normal_stream(seed, base + np.uint64(1 + i))
        ct = np.where(xhat, scn.dest_signal[i], 0.0) + scn.dest_mu[i] + scn.dest_sigma[i] * zt

        statistic = statistic + scn.weight[i] * ct

        z1 = (ct - scn.dest_signal[i] - scn.dest_mu[i]) / scn.dest_sigma[i]
        z0 = (ct - scn.dest_mu[i]) / scn.dest_sigma[i]
        g1 = -0.5 * z1 * z1
        g0 = -0.5 * z0 * z0
        num = _logaddexp2way(scn.ln_pd[i] + g1, scn.ln_1m_pd[i] + g0)
        den = _logaddexp2way(scn.ln_pfa[i] + g1, scn.ln_1m_pfa[i] + g0)
        llr = llr + (num - den)

    dec_linear = statistic > scn.fusion_threshold
    dec_exact = llr > scn.log_prior_odds
    errors_linear = int(np.count_nonzero(dec_linear != x0))
    errors_exact = int(np.count_nonzero(dec_exact != x0))
    agree = int(np.count_nonzero(dec_linear == dec_exact))
    return errors_linear, errors_exact, agree
