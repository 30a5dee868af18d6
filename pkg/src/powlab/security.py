"""Attack probability and perceived network safety.

A representative attacker observes a noisy private signal of the net attack
profit g*P - k*H and attacks above the threshold s_star, so the attack goes
off with probability 1 - Psi((s_star - (g*P - k*H)) / sigma_eps). Safety is
the complement, together with its analytic partials in P and H.
"""

from __future__ import annotations

from dataclasses import dataclass

from .normal import clamp_open_unit, std_normal_cdf, std_normal_pdf
from .params import SecurityParams


@dataclass(frozen=True)
class SafetyPoint:
    pi_attack: float
    safety: float
    z: float
    d_safety_dP: float
    d_safety_dH: float


def _signal_z(sec: SecurityParams, P: float, H: float) -> float:
    return (sec.s_star - (sec.g * P - sec.k * H)) / sec.sigma_eps


def attack_probability(sec: SecurityParams, P: float, H: float) -> float:
    """Probability of a successful attack; increasing in P, decreasing in H."""
    return clamp_open_unit(1.0 - std_normal_cdf(_signal_z(sec, P, H)))


def safety(sec: SecurityParams, P: float, H: float) -> SafetyPoint:
    """Perceived safety with analytic partials.

    In the deep tails the normal density underflows to 0, so the partials
    return exactly 0 there instead of NaN.
    """
    z = _signal_z(sec, P, H)
    level = std_normal_cdf(z)
    dens = std_normal_pdf(z)
    return SafetyPoint(
        pi_attack=clamp_open_unit(1.0 - level),
        safety=level,
        z=z,
        d_safety_dP=-(sec.g / sec.sigma_eps) * dens,
        d_safety_dH=(sec.k / sec.sigma_eps) * dens,
    )
