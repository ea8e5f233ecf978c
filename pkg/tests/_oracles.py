"""Independent reference implementations used to freeze expected values.

Everything here is deliberately written from the ground truth definitions
through a *different* route than the package: normal tails via
scipy.stats.norm / quadrature (the package uses erfc directly), peak gains
via mpmath at 40 digits, the RNG via a literal big-integer transcription
of the published SplitMix64 algorithm.  Tests compare the package against
these oracles and against constants frozen from them.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate
from scipy.stats import norm

_MASK64 = (1 << 64) - 1


def splitmix64_reference(seed: int, count: int) -> list[int]:
    """Literal transcription of the published SplitMix64 next() loop."""
    x = seed & _MASK64
    out = []
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


def q_tail(x):
    """Normal tail probability via scipy.stats (not the package's erfc route)."""
    return norm.sf(x)


def q_tail_quadrature(x: float) -> float:
    """Normal tail probability by numerical integration of the density."""
    value, _ = integrate.quad(norm.pdf, x, np.inf)
    return value


def peak_gain_um(d_um: float) -> float:
    """High-precision peak gain at a distance given in micrometres."""
    import mpmath as mp

    with mp.workdps(40):
        shape = (3 / (2 * mp.pi * mp.e)) ** mp.mpf("1.5")
        d_cm = mp.mpf(repr(d_um)) * mp.mpf("1e-4")
        return float(d_cm**-3 * shape)


def relay_operating_point(s: float, mu: float, sigma: float, beta: float):
    """Closed-form (P_D, P_FA) of the scalar LRT, transcribed independently."""
    threshold = s / 2.0 + mu + (sigma * sigma / s) * np.log((1.0 - beta) / beta)
    return q_tail((threshold - s - mu) / sigma), q_tail((threshold - mu) / sigma)


def pe_from_point(p_d: float, p_fa: float, beta: float) -> float:
    return beta * (1.0 - p_d) + (1.0 - beta) * p_fa


def pe_single_link(s: float, mu: float, sigma: float, beta: float) -> float:
    p_d, p_fa = relay_operating_point(s, mu, sigma, beta)
    return pe_from_point(p_d, p_fa, beta)


def pe_cooperative(beta: float, branches) -> float:
    """End-to-end closed form; branches are (s, mu, sig, st, mut, sigt)."""
    weights, terms = [], []
    for s, mu, sig, st, mut, sigt in branches:
        p_d, p_fa = relay_operating_point(s, mu, sig, beta)
        delta = p_d - p_fa
        weights.append(st / sigt**2 * delta)
        terms.append((st * st + 2.0 * st * mut) / (2.0 * sigt**2) * delta)
    weights = np.asarray(weights)
    st = np.asarray([b[3] for b in branches])
    mut = np.asarray([b[4] for b in branches])
    sigt = np.asarray([b[5] for b in branches])
    threshold = np.log((1.0 - beta) / beta) + np.sum(terms)
    scale = np.sqrt(np.sum(weights**2 * sigt**2))
    p_d = q_tail((threshold - np.sum(weights * (st + mut))) / scale)
    p_fa = q_tail((threshold - np.sum(weights * mut)) / scale)
    return pe_from_point(p_d, p_fa, beta)


def pe_broadcast(beta: float, branches) -> float:
    """Perfect-branch fusion closed form; branches are (st, mut, sigt)."""
    st = np.asarray([b[0] for b in branches])
    mut = np.asarray([b[1] for b in branches])
    sigt = np.asarray([b[2] for b in branches])
    weights = st / sigt**2
    terms = (st**2 + 2.0 * st * mut) / (2.0 * sigt**2)
    threshold = np.log((1.0 - beta) / beta) + np.sum(terms)
    scale = np.sqrt(np.sum(weights**2 * sigt**2))
    p_d = q_tail((threshold - np.sum(weights * (st + mut))) / scale)
    p_fa = q_tail((threshold - np.sum(weights * mut)) / scale)
    return pe_from_point(p_d, p_fa, beta)


# Frozen high-precision constants (produced by the functions above; see
# their docstrings).  Peak gains are in cm^-3 per molecule.
HP_10UM = 7.36156848474256608e7
HP_20UM = 9.2019606059282076e6
HP_25UM = 4.71140383023524229e6
HP_30UM = 2.7265068462009504e6

# Reference parameter set used across fixtures: Gaussian MUI at every
# surface with mean 4e16 molecules/cm^3 and coefficient of variation 0.3.
MUI_MEAN = 4e16
MUI_STD = 1.2e16
