"""Free-diffusion channel arithmetic for point-source molecular links.

All quantities use CGS-style units: distances in cm, the diffusion
coefficient in cm^2/s, concentrations in molecules/cm^3.  The config layer
accepts micrometres and converts on ingest (see :func:`um_to_cm`).

A point source releasing one molecule at the origin of an unbounded 3-D
medium produces the concentration profile

    h(t) = (4 pi D t)^(-3/2) * exp(-d^2 / (4 D t))

at distance d.  The profile peaks at t_p = d^2 / (6 D) with value

    h_p(d) = d^-3 * (3 / (2 pi e))^(3/2),

notably independent of D.  Receivers in this model sample the peak value
once per symbol, so h_p is the per-molecule link gain used everywhere else
in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# (3 / (2 pi e))^(3/2): dimensionless shape factor of the diffusion peak.
PEAK_SHAPE_FACTOR = (3.0 / (2.0 * math.pi * math.e)) ** 1.5

# Micrometre <-> centimetre scale. Scaling is correctly rounded; round trips
# are exact at 1e-3 um resolution but not necessarily bitwise (see tests).
_CM_PER_UM = 1e-4


def um_to_cm(um: float) -> float:
    """Convert micrometres to centimetres."""
    return um * _CM_PER_UM


def cm_to_um(cm: float) -> float:
    """Convert centimetres to micrometres."""
    return cm / _CM_PER_UM


@dataclass(frozen=True)
class Medium:
    """Unbounded diffusion medium.

    diffusion_coefficient: D in cm^2/s, strictly positive.
    """

    diffusion_coefficient: float

    def __post_init__(self) -> None:
        d = self.diffusion_coefficient
        if not (isinstance(d, (int, float)) and math.isfinite(d) and d > 0):
            raise ValueError(f"diffusion coefficient must be finite and > 0, got {d!r}")


@dataclass(frozen=True)
class Link:
    """Straight-line transmitter-receiver separation, in cm (> 0)."""

    distance: float

    def __post_init__(self) -> None:
        d = self.distance
        if not (isinstance(d, (int, float)) and math.isfinite(d) and d > 0):
            raise ValueError(f"link distance must be finite and > 0 cm, got {d!r}")

    @classmethod
    def from_um(cls, um: float) -> "Link":
        return cls(um_to_cm(um))

    @property
    def distance_um(self) -> float:
        return cm_to_um(self.distance)


@dataclass(frozen=True)
class MuiModel:
    """Gaussian multi-user interference at one receiving surface.

    The aggregate concentration from many uncoordinated co-channel emitters
    is modelled as N(mean, std^2) by the central limit theorem.  mean >= 0,
    std > 0, both in molecules/cm^3.  Realisations may be negative; that is
    a property of the Gaussian model and is deliberately not clamped.
    """

    mean: float
    std: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and self.mean >= 0):
            raise ValueError(f"MUI mean must be finite and >= 0, got {self.mean!r}")
        if not (math.isfinite(self.std) and self.std > 0):
            raise ValueError(f"MUI std must be finite and > 0, got {self.std!r}")


@dataclass(frozen=True)
class Emission:
    """Molecule count released for one symbol (continuous, >= 0)."""

    molecules: float

    def __post_init__(self) -> None:
        q = self.molecules
        if not (isinstance(q, (int, float)) and math.isfinite(q) and q >= 0):
            raise ValueError(f"emission must be finite and >= 0 molecules, got {q!r}")


def impulse_response(t: float, link: Link, medium: Medium) -> float:
    """Per-molecule concentration h(t) at the link's receiver, in cm^-3.

    Requires t > 0.  The deep-tail exponential underflow (t -> 0+ at finite
    distance) returns exactly 0.0, the physically meaningful limit.
    """
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0):
        raise ValueError(f"time must be finite and > 0 s, got {t!r}")
    d = link.distance
    four_dt = 4.0 * medium.diffusion_coefficient * t
    return (math.pi * four_dt) ** -1.5 * math.exp(-d * d / four_dt)


def peak_time(link: Link, medium: Medium) -> float:
    """Time of the concentration peak, t_p = d^2 / (6 D), in seconds."""
    d = link.distance
    return d * d / (6.0 * medium.diffusion_coefficient)


def peak_gain(link: Link) -> float:
    """Peak per-molecule concentration h_p(d) = d^-3 (3/(2 pi e))^(3/2).

    Independent of the diffusion coefficient: D moves the peak in time but
    not in amplitude.  Units: cm^-3 per emitted molecule.
    """
    return link.distance**-3 * PEAK_SHAPE_FACTOR


def mui_from_interferers(
    count: int,
    emission_each: Emission,
    link: Link,
    coefficient_of_variation: float,
) -> MuiModel:
    """Gaussian MUI from `count` equal interferers at a common distance.

    The mean is the superposed peak concentration count * Q * h_p(d); the
    standard deviation scales the mean by the medium's coefficient of
    variation.  count must be >= 1 so the model keeps a positive std.
    """
    if not (isinstance(count, int) and count >= 1):
        raise ValueError(f"interferer count must be an integer >= 1, got {count!r}")
    if not (math.isfinite(coefficient_of_variation) and coefficient_of_variation > 0):
        raise ValueError(
            f"coefficient of variation must be finite and > 0, got {coefficient_of_variation!r}"
        )
    mean = count * emission_each.molecules * peak_gain(link)
    return MuiModel(mean=mean, std=coefficient_of_variation * mean)
