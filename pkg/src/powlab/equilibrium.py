"""Market-clearing equilibria of the composed economy.

Excess demand Z(P) composes the hash-supply curve, the safety function, and
total demand against the fixed asset supply Q. Equilibria are the roots of
Z, located by a sign-change scan over a price grid and refined by Brent's
method. The aggregate demand slope decomposes into a stabilizing direct
price effect and a destabilizing security-feedback effect, which classifies
local stability and powers the uniqueness check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .demand import total_demand
from .errors import ParameterError, SolverError
from .hashsupply import _derivative_at, solve_hash_supply
from .params import ValidatedEconomyParams
from .rootfind import brent
from .security import safety

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

#: Default price window for scans and divergence checks.
DEFAULT_WINDOW = (1e-6, 1e9)


@dataclass(frozen=True)
class SlopeDecomposition:
    """Aggregate demand slope split into direct and security-feedback parts."""

    direct: float
    indirect: float
    total: float


@dataclass(frozen=True)
class Equilibrium:
    P_star: float
    H_star: float
    sigma_star: float
    excess_residual: float
    slope: SlopeDecomposition
    stability: str


@dataclass(frozen=True)
class ScanConfig:
    """Grid specification for equilibrium scans."""

    p_min: float = DEFAULT_WINDOW[0]
    p_max: float = DEFAULT_WINDOW[1]
    n_grid: int = 4096
    log_spaced: bool = True
    refine_tol: float = 1e-12

    def __post_init__(self):
        problems = []
        if not (isinstance(self.p_min, float | int) and 0 < self.p_min):
            problems.append(f"p_min must be > 0 (got {self.p_min!r})")
        if not (isinstance(self.p_max, float | int) and self.p_min < self.p_max):
            problems.append(
                f"p_max must be > p_min (got p_min={self.p_min!r}, p_max={self.p_max!r})"
            )
        if not (isinstance(self.n_grid, int) and self.n_grid >= 16):
            problems.append(f"n_grid must be an int >= 16 (got {self.n_grid!r})")
        if not (isinstance(self.refine_tol, float | int) and self.refine_tol > 0):
            problems.append(f"refine_tol must be > 0 (got {self.refine_tol!r})")
        if problems:
            raise ParameterError(problems)

    def grid(self) -> list[float]:
        n = self.n_grid
        if self.log_spaced:
            lo, hi = math.log(self.p_min), math.log(self.p_max)
            pts = [math.exp(lo + (hi - lo) * i / (n - 1)) for i in range(n)]
        else:
            pts = [self.p_min + (self.p_max - self.p_min) * i / (n - 1)
                   for i in range(n)]
        pts[0], pts[-1] = self.p_min, self.p_max
        return pts


@dataclass(frozen=True)
class EquilibriumScan:
    """Equilibria on a window plus the boundary diagnostics of the scan."""

    equilibria: tuple[Equilibrium, ...]
    z_p_min: float
    z_p_max: float
    warnings: tuple[str, ...] = ()

    @property
    def boundary_ok(self) -> bool:
        return self.z_p_min > 0.0 and self.z_p_max < 0.0


@dataclass(frozen=True)
class TatonnementResult:
    """Trace of the additive price-adjustment iteration."""

    trajectory: tuple[tuple[int, float, float], ...]
    outcome: str  # "converged" | "diverged" | "max_iters"
    p_limit: float | None
    iterations: int


@dataclass(frozen=True)
class UniquenessReport:
    """Grid check of the slope-dominance condition |direct| > indirect."""

    holds_everywhere: bool
    violation_intervals: tuple[tuple[float, float], ...]
    margin: float


def excess_demand(
    params: ValidatedEconomyParams, P: float, h_init: float | None = None
) -> float:
    """Total demand at the composed state minus the fixed supply Q."""
    sp = solve_hash_supply(params, P, h_init=h_init)
    sf = safety(params.security, P, sp.H)
    dp = total_demand(params.demand, P, sf.safety)
    return dp.d_total - params.protocol.Q


def aggregate_demand_slope(
    params: ValidatedEconomyParams, P: float
) -> SlopeDecomposition:
    """Chain-rule slope of demand along the supply curve at price ``P``.

    The direct part bundles the pure price effect with the attacker-payoff
    channel; the indirect part carries the hashrate-security feedback and is
    exactly 0 in the corner regime (dH/dP = 0).
    """
    sp = solve_hash_supply(params, P)
    sf = safety(params.security, P, sp.H)
    dp = total_demand(params.demand, P, sf.safety)
    dHdP = _derivative_at(params, sp)
    direct = dp.dD_dP + dp.dD_dSigma * sf.d_safety_dP
    indirect = dp.dD_dSigma * sf.d_safety_dH * dHdP
    return SlopeDecomposition(direct=direct, indirect=indirect,
                              total=direct + indirect)


def _grid_excess(params: ValidatedEconomyParams, grid: list[float]) -> list[float]:
    # Warm-start each hash solve from the neighbouring grid point.
    values = []
    h_prev: float | None = None
    for p in grid:
        sp = solve_hash_supply(params, p, h_init=h_prev)
        h_prev = sp.H
        sf = safety(params.security, p, sp.H)
        dp = total_demand(params.demand, p, sf.safety)
        values.append(dp.d_total - params.protocol.Q)
    return values


def _classify(slope_total: float, Q: float, P: float) -> str:
    tol = 1e-12 * Q / P
    if slope_total < -tol:
        return STABLE
    if slope_total > tol:
        return UNSTABLE
    return MARGINAL


def _equilibrium_at(params: ValidatedEconomyParams, P: float) -> Equilibrium:
    Q = params.protocol.Q
    sp = solve_hash_supply(params, P)
    sf = safety(params.security, P, sp.H)
    dp = total_demand(params.demand, P, sf.safety)
    residual = abs(dp.d_total - Q)
    if residual > 1e-9 * Q:
        raise SolverError(
            f"refined root at P={P!r} violates the residual bound: "
            f"|Z|={residual!r} > {1e-9 * Q!r}"
        )
    slope = aggregate_demand_slope(params, P)
    return Equilibrium(
        P_star=P,
        H_star=sp.H,
        sigma_star=sf.safety,
        excess_residual=residual,
        slope=slope,
        stability=_classify(slope.total, Q, P),
    )


def find_equilibria(
    params: ValidatedEconomyParams, scan: ScanConfig | None = None
) -> EquilibriumScan:
    """All equilibria on the scan window, ascending in price.

    Every sign change of Z between grid neighbours is refined by Brent's
    method; roots that land exactly on grid nodes are kept as-is. Boundary
    diagnostics record whether Z is positive at p_min and negative at p_max
    (the shape that guarantees existence); warnings are attached otherwise.
    """
    if scan is None:
        scan = ScanConfig()
    Q = params.protocol.Q
    grid = scan.grid()
    z = _grid_excess(params, grid)

    roots: list[float] = []
    for i in range(len(grid) - 1):
        fa, fb = z[i], z[i + 1]
        if fa == 0.0:
            roots.append(grid[i])
            continue
        if (fa > 0.0) == (fb > 0.0) or fb == 0.0:
            continue
        result = brent(
            lambda p: excess_demand(params, p),
            grid[i], grid[i + 1], fa, fb,
            rtol=scan.refine_tol, ftol=1e-12 * Q, max_iter=200,
        )
        if not result.converged:
            raise SolverError(
                f"root refinement failed on bracket [{grid[i]!r}, {grid[i + 1]!r}]: "
                f"residual {result.f_root!r} after {result.iterations} iterations"
            )
        roots.append(result.root)
    if z[-1] == 0.0:
        roots.append(grid[-1])

    warnings = []
    if z[0] <= 0.0:
        warnings.append(
            f"Z(p_min)={z[0]!r} <= 0: existence is not guaranteed on this window"
        )
    if z[-1] >= 0.0:
        warnings.append(
            f"Z(p_max)={z[-1]!r} >= 0: existence is not guaranteed on this window"
        )

    equilibria = tuple(_equilibrium_at(params, p) for p in roots)
    return EquilibriumScan(
        equilibria=equilibria,
        z_p_min=z[0],
        z_p_max=z[-1],
        warnings=tuple(warnings),
    )


def tatonnement(
    params: ValidatedEconomyParams,
    P0: float,
    kappa: float,
    tol: float = 1e-8,
    max_iters: int = 10_000,
    window: tuple[float, float] = DEFAULT_WINDOW,
) -> TatonnementResult:
    """Iterate P <- max(P * 1e-6, P + kappa * Z(P)) until convergence.

    Stops when |Z| <= tol (converged), when the price leaves the window by a
    factor of 10 on either side (diverged), or at the iteration cap.
    """
    if not P0 > 0.0:
        raise ParameterError([f"P0 must be > 0 (got {P0!r})"])
    if not kappa > 0.0:
        raise ParameterError([f"kappa must be > 0 (got {kappa!r})"])
    floor_factor = 1e-6
    p = P0
    zval = excess_demand(params, p)
    trajectory = [(0, p, zval)]
    if abs(zval) <= tol:
        return TatonnementResult(tuple(trajectory), "converged", p, 0)
    for iteration in range(1, max_iters + 1):
        p = max(p * floor_factor, p + kappa * zval)
        zval = excess_demand(params, p)
        trajectory.append((iteration, p, zval))
        if abs(zval) <= tol:
            return TatonnementResult(tuple(trajectory), "converged", p, iteration)
        if p > window[1] * 10.0 or p < window[0] / 10.0:
            return TatonnementResult(tuple(trajectory), "diverged", None, iteration)
    return TatonnementResult(tuple(trajectory), "max_iters", None, max_iters)


def check_uniqueness_condition(
    params: ValidatedEconomyParams, scan: ScanConfig | None = None
) -> UniquenessReport:
    """Test |direct| > indirect at every grid point of the scan window.

    A point violates only when the feedback term is live (indirect > 0) and
    weakly dominates; points where both sides underflow to zero (saturated
    safety, corner supply) cannot create an upward demand slope and count as
    holding. Contiguous violating points merge into price intervals.
    """
    if scan is None:
        scan = ScanConfig()
    grid = scan.grid()
    margin = math.inf
    violating = []
    h_prev: float | None = None
    for p in grid:
        sp = solve_hash_supply(params, p, h_init=h_prev)
        h_prev = sp.H
        sf = safety(params.security, p, sp.H)
        dp = total_demand(params.demand, p, sf.safety)
        dHdP = _derivative_at(params, sp)
        direct = dp.dD_dP + dp.dD_dSigma * sf.d_safety_dP
        indirect = dp.dD_dSigma * sf.d_safety_dH * dHdP
        margin = min(margin, abs(direct) - indirect)
        violating.append(indirect > 0.0 and indirect >= abs(direct))

    intervals: list[tuple[float, float]] = []
    start: int | None = None
    for i, bad in enumerate(violating):
        if bad and start is None:
            start = i
        elif not bad and start is not None:
            intervals.append((grid[start], grid[i - 1]))
            start = None
    if start is not None:
        intervals.append((grid[start], grid[-1]))

    return UniquenessReport(
        holds_everywhere=not intervals,
        violation_intervals=tuple(intervals),
        margin=margin,
    )
