"""User, speculator, and total asset demand.

Users demand theta_U * safety * P**(-eps); speculators demand
(theta_S * safety - delta) / P, floored at zero when perceived safety is too
low to cover their baseline risk cost. The floor keeps total demand
continuous; at the exact boundary the unfloored (right) derivative applies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .params import DemandParams


@dataclass(frozen=True)
class DemandPoint:
    d_user: float
    d_spec: float
    d_total: float
    dD_dP: float
    dD_dSigma: float
    spec_floored: bool


def user_demand(dem: DemandParams, P: float, sigma: float) -> float:
    """Transactional demand theta_U * sigma * P**(-eps)."""
    if P <= 0.0:
        raise DomainError(f"P must be > 0 (got {P!r})")
    return dem.theta_U * sigma * P ** (-dem.eps)


def speculator_demand(dem: DemandParams, P: float, sigma: float) -> float:
    """Speculative demand max(0, theta_S * sigma - delta) / P."""
    if P <= 0.0:
        raise DomainError(f"P must be > 0 (got {P!r})")
    return max(0.0, dem.theta_S * sigma - dem.delta) / P


def total_demand(dem: DemandParams, P: float, sigma: float) -> DemandPoint:
    """Total demand with partials in P (at fixed sigma) and sigma (at fixed P)."""
    if P <= 0.0:
        raise DomainError(f"P must be > 0 (got {P!r})")
    d_user = dem.theta_U * sigma * P ** (-dem.eps)
    spec_net = dem.theta_S * sigma - dem.delta
    floored = spec_net < 0.0
    d_spec = 0.0 if floored else spec_net / P
    dD_dP = -dem.eps * dem.theta_U * sigma * P ** (-dem.eps - 1.0)
    dD_dSigma = dem.theta_U * P ** (-dem.eps)
    if not floored:
        dD_dP -= spec_net / (P * P)
        dD_dSigma += dem.theta_S / P
    return DemandPoint(
        d_user=d_user,
        d_spec=d_spec,
        d_total=d_user + d_spec,
        dD_dP=dD_dP,
        dD_dSigma=dD_dSigma,
        spec_floored=floored,
    )
