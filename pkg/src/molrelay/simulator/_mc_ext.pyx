# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel: the per-trial chain in a C loop.

Mirrors _kernel_py draw-for-draw: SplitMix64 counter RNG (same constants),
inverse-CDF gaussians through scipy's C ndtri, identical accumulation
order.  No -ffast-math: IEEE semantics keep the two backends bit-identical.
"""

from libc.math cimport INFINITY, exp, log1p
from libc.stdint cimport uint64_t

from scipy.special.cython_special cimport ndtri

cdef enum ScenarioKind:
    KIND_TWO_PHASE = 0
    KIND_BROADCAST = 1
    KIND_DIRECT = 2

cdef double U53_SCALE = 1.0 / 9007199254740992.0  # 2^-53


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double u01(uint64_t seed, uint64_t index) noexcept nogil:
    cdef uint64_t bits = mix64(seed + (index + 1) * <uint64_t>0x9E3779B97F4A7C15)
    return (<double>(bits >> 11) + 0.5) * U53_SCALE


cdef inline double lse2(double a, double b) noexcept nogil:
    cdef double hi, lo
    if a >= b:
        hi = a; lo = b
    else:
        hi = b; lo = a
    if hi == -INFINITY:
        return -INFINITY
    return hi + log1p(exp(lo - hi))


def chain_counts(scn, seed, start, n):
    """Simulate trials [start, start+n); see _kernel_py.chain_counts."""
    cdef uint64_t seed_u = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t start_u = <uint64_t>start
    cdef Py_ssize_t n_trials = <Py_ssize_t>n
    cdef int kind = scn.kind
    cdef uint64_t draws = <uint64_t>scn.draws_per_trial
    cdef double beta = scn.prior_one
    cdef double log_prior_odds = scn.log_prior_odds
    cdef double fusion_threshold = scn.fusion_threshold

    cdef double[::1] rs = scn.relay_signal
    cdef double[::1] rmu = scn.relay_mu
    cdef double[::1] rsig = scn.relay_sigma
    cdef double[::1] rscale = scn.relay_scale
    cdef double[::1] rthr = scn.relay_threshold
    cdef double[::1] ds = scn.dest_signal
    cdef double[::1] dmu = scn.dest_mu
    cdef double[::1] dsig = scn.dest_sigma
    cdef double[::1] w = scn.weight
    cdef double[::1] lpd = scn.ln_pd
    cdef double[::1] l1pd = scn.ln_1m_pd
    cdef double[::1] lpfa = scn.ln_pfa
    cdef double[::1] l1pfa = scn.ln_1m_pfa
    cdef Py_ssize_t nb = ds.shape[0]

    cdef Py_ssize_t t, i
    cdef uint64_t base
    cdef double c, ct, statistic, llr, z, z1, z0, g1, g0
    cdef bint x0, xhat, dec_linear, dec_exact
    cdef long long errors_linear = 0, errors_exact = 0, agree = 0

    with nogil:
        for t in range(n_trials):
            base = (start_u + <uint64_t>t) * draws
            x0 = u01(seed_u, base) < beta

            if kind == KIND_DIRECT:
                z = ndtri(u01(seed_u, base + 1))
                c = (rs[0] if x0 else 0.0) + rmu[0] + rsig[0] * z
                dec_linear = rscale[0] * c > rthr[0]
                if dec_linear != x0:
                    errors_linear += 1
                    errors_exact += 1
                agree += 1
                continue

            statistic = 0.0
            llr = 0.0
            for i in range(nb):
                if kind == KIND_TWO_PHASE:
                    z = ndtri(u01(seed_u, base + 1 + <uint64_t>i))
                    c = (rs[i] if x0 else 0.0) + rmu[i] + rsig[i] * z
                    xhat = rscale[i] * c > rthr[i]
                    z = ndtri(u01(seed_u, base + 1 + <uint64_t>(nb + i)))
                else:
                    xhat = x0
                    z = ndtri(u01(seed_u, base + 1 + <uint64_t>i))
                ct = (ds[i] if xhat else 0.0) + dmu[i] + dsig[i] * z

                statistic = statistic + w[i] * ct

                z1 = (ct - ds[i] - dmu[i]) / dsig[i]
                z0 = (ct - dmu[i]) / dsig[i]
                g1 = -0.5 * z1 * z1
                g0 = -0.5 * z0 * z0
                llr = llr + (lse2(lpd[i] + g1, l1pd[i] + g0)
                             - lse2(lpfa[i] + g1, l1pfa[i] + g0))

            dec_linear = statistic > fusion_threshold
            dec_exact = llr > log_prior_odds
            if dec_linear != x0:
                errors_linear += 1
            if dec_exact != x0:
                errors_exact += 1
            if dec_linear == dec_exact:
                agree += 1

    return int(errors_linear), int(errors_exact), int(agree)
