"""Free-entry aggregate hash-rate supply.

Miners enter while revenue per hash covers their marginal cost, so the
interior supply level solves H * c(H) = P * (B + Phi), where c(H) is the
cost of the marginal (mass-H) miner. Once total block revenue covers even
the most expensive miner, supply pins at the full mass M (corner regime).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .errors import DomainError, SolverError
from .params import MinerCostModel, ProtocolParams, ValidatedEconomyParams

_EPS = sys.float_info.epsilon

# Interior solve targets ~1e-13 relative residual; the contract demands 1e-10.
_RESIDUAL_TARGET = 1e-13
_RESIDUAL_LIMIT = 1e-10
_MAX_ITER = 200


@dataclass(frozen=True)
class HashSupplyPoint:
    """Solved supply at one price: level, marginal cost, corner flag."""

    P: float
    H: float
    c_marginal: float
    at_corner: bool


def cdf(costs: MinerCostModel, c: float) -> float:
    """Mass of miners with marginal cost at most ``c`` (clamped to [0, M])."""
    return costs.mass * costs.family.unit_cdf(c)


def inv_cdf(costs: MinerCostModel, h: float) -> float:
    """Marginal cost of the mass-``h`` miner; defined for h in (0, M]."""
    if not 0.0 < h <= costs.mass:
        raise DomainError(f"h must be in (0, {costs.mass!r}] (got {h!r})")
    return costs.family.unit_quantile(h / costs.mass)


def density(costs: MinerCostModel, c: float) -> float:
    """Mass density of miners at cost ``c`` on the open support."""
    if not costs.c_min < c < costs.c_max:
        raise DomainError(
            f"c must be inside ({costs.c_min!r}, {costs.c_max!r}) (got {c!r})"
        )
    return costs.mass * costs.family.unit_density(c)


def revenue_per_hash(protocol: ProtocolParams, P: float, H: float) -> float:
    """Block revenue per unit of hash: P * (B + Phi) / H."""
    if H <= 0.0:
        raise DomainError(f"H must be > 0 (got {H!r})")
    if P <= 0.0:
        raise DomainError(f"P must be > 0 (got {P!r})")
    return P * (protocol.B + protocol.Phi) / H


def solve_hash_supply(
    params: ValidatedEconomyParams, P: float, h_init: float | None = None
) -> HashSupplyPoint:
    """Aggregate hash-rate supplied at price ``P``.

    Interior solutions are found by safeguarded Newton iteration on the
    strictly increasing map h -> h * c(h), bisecting whenever a Newton step
    leaves the bracket. ``h_init`` warm-starts the iteration (grid sweeps
    and weekly simulations pass the neighbouring solution).
    """
    if not P > 0.0:
        raise DomainError(f"P must be > 0 (got {P!r})")
    costs = params.costs
    fam = costs.family
    mass = costs.mass
    revenue = P * (params.protocol.B + params.protocol.Phi)

    if revenue >= mass * fam.c_max:
        return HashSupplyPoint(P=P, H=mass, c_marginal=fam.c_max, at_corner=True)

    quantile = fam.unit_quantile

    def residual(h: float) -> float:
        return h * quantile(h / mass) - revenue

    lo = mass * 1e-15
    flo = residual(lo)
    while flo > 0.0:
        # Price so small that the root sits below the default bracket floor.
        lo *= 1e-3
        if lo < 1e-290:
            raise SolverError(
                f"hash supply bracket collapsed at P={P!r} (revenue {revenue!r})"
            )
        flo = residual(lo)
    hi = mass
    fhi = mass * fam.c_max - revenue  # > 0 by the corner check

    if h_init is not None and lo < h_init < hi:
        h = h_init
    else:
        h = 0.5 * (lo + hi)
    fh = residual(h)

    iterations = 0
    while abs(fh) > _RESIDUAL_TARGET * revenue and hi - lo > 4.0 * _EPS * hi:
        iterations += 1
        if iterations > _MAX_ITER:
            break
        if fh > 0.0:
            hi, fhi = h, fh
        else:
            lo, flo = h, fh
        c = quantile(h / mass)
        dens = mass * fam.unit_density(c)
        step_ok = False
        if dens > 0.0:
            slope = c + h / dens
            if slope > 0.0 and slope != float("inf"):
                h_new = h - fh / slope
                if lo < h_new < hi:
                    h, fh = h_new, residual(h_new)
                    step_ok = True
        if not step_ok:
            h = 0.5 * (lo + hi)
            fh = residual(h)

    if abs(fh) > _RESIDUAL_LIMIT * revenue:
        raise SolverError(
            f"hash supply solve did not converge at P={P!r}: "
            f"bracket [{lo!r}, {hi!r}], residual {fh!r} (target {revenue!r})"
        )
    return HashSupplyPoint(P=P, H=h, c_marginal=quantile(h / mass), at_corner=False)


def _derivative_at(params: ValidatedEconomyParams, point: HashSupplyPoint) -> float:
    if point.at_corner:
        return 0.0
    reward = params.protocol.B + params.protocol.Phi
    dens = params.costs.mass * params.costs.family.unit_density(point.c_marginal)
    # For every built-in family h/density -> 0 toward the support edges, so a
    # degenerate density evaluation (0 or inf from float rounding) drops the term.
    ratio = point.H / dens if 0.0 < dens < float("inf") else 0.0
    denom = point.c_marginal + ratio
    return reward / denom if denom > 0.0 else float("inf")


def hash_supply_derivative(params: ValidatedEconomyParams, P: float) -> float:
    """dH/dP by implicit differentiation; 0 in the corner regime."""
    return _derivative_at(params, solve_hash_supply(params, P))
