"""Comparative statics: the halving experiment and bifurcation sweeps."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .equilibrium import (
    STABLE,
    Equilibrium,
    EquilibriumScan,
    ScanConfig,
    check_uniqueness_condition,
    find_equilibria,
)
from .errors import DomainError, ParameterError, ScenarioError
from .hashsupply import solve_hash_supply
from .params import (
    DemandParams,
    EconomyParams,
    PowerCosts,
    ProtocolParams,
    SecurityParams,
    UniformCosts,
    ValidatedEconomyParams,
    validate,
)


@dataclass(frozen=True)
class HalvingReport:
    pre: Equilibrium
    post: Equilibrium
    delta_P: float
    delta_H: float
    delta_sigma: float
    selection_note: str


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    valid: bool
    error: str | None
    equilibria: tuple[Equilibrium, ...]


@dataclass(frozen=True)
class SweepResult:
    axis_field: str
    grid: tuple[float, ...]
    rows: tuple[SweepRow, ...]
    bifurcation_points: tuple[tuple[float, float], ...]


def apply_halving(params: ValidatedEconomyParams) -> ValidatedEconomyParams:
    """Copy of the economy with the block subsidy cut in half."""
    if not params.protocol.B > 0.0:
        raise DomainError(f"B must be > 0 to halve (got {params.protocol.B!r})")
    return replace(params, protocol=replace(params.protocol, B=params.protocol.B / 2.0))


def _select_reference(scan: EquilibriumScan) -> tuple[Equilibrium, str]:
    eqs = scan.equilibria
    if len(eqs) == 1:
        return eqs[0], "unique equilibrium"
    stable = [e for e in eqs if e.stability == STABLE]
    if stable:
        return stable[-1], f"highest-P stable of {len(eqs)}"
    return eqs[-1], f"highest-P of {len(eqs)} (none stable)"


def halving_report(
    params: ValidatedEconomyParams, scan: ScanConfig | None = None
) -> HalvingReport:
    """Solve the economy before and after a halving and report the shift.

    Under multiplicity the comparison tracks the highest-price stable
    equilibrium on each side (recorded in ``selection_note``). When the
    slope-dominance condition holds on the window both pre and post, the
    contraction prediction (price and hashrate both fall) is verified and a
    violation raises ScenarioError.
    """
    if scan is None:
        scan = ScanConfig()
    post_params = apply_halving(params)

    pre_scan = find_equilibria(params, scan)
    if not pre_scan.equilibria:
        raise ScenarioError(
            "no pre-halving equilibrium on the window: "
            f"Z(p_min)={pre_scan.z_p_min!r}, Z(p_max)={pre_scan.z_p_max!r}"
        )
    post_scan = find_equilibria(post_params, scan)
    if not post_scan.equilibria:
        raise ScenarioError(
            "no post-halving equilibrium on the window: "
            f"Z(p_min)={post_scan.z_p_min!r}, Z(p_max)={post_scan.z_p_max!r}"
        )

    pre_eq, pre_note = _select_reference(pre_scan)
    post_eq, post_note = _select_reference(post_scan)
    delta_p = post_eq.P_star - pre_eq.P_star
    delta_h = post_eq.H_star - pre_eq.H_star
    delta_sigma = post_eq.sigma_star - pre_eq.sigma_star

    unique_pre = check_uniqueness_condition(params, scan).holds_everywhere
    unique_post = check_uniqueness_condition(post_params, scan).holds_everywhere
    both_corner = (solve_hash_supply(params, pre_eq.P_star).at_corner
                   and solve_hash_supply(post_params, post_eq.P_star).at_corner)
    if unique_pre and unique_post and not both_corner:
        # Contraction is a theorem once supply responds at all, so a wrong
        # sign means a solver bug. With supply pinned at the full miner mass
        # on both sides the halving is inert and every delta is exactly 0.
        price_tol = 1e-9 * max(pre_eq.P_star, post_eq.P_star)
        if not (delta_h < 0.0 and delta_p <= price_tol):
            raise ScenarioError(
                f"halving contraction violated under uniqueness: "
                f"delta_P={delta_p!r}, delta_H={delta_h!r}"
            )

    return HalvingReport(
        pre=pre_eq,
        post=post_eq,
        delta_P=delta_p,
        delta_H=delta_h,
        delta_sigma=delta_sigma,
        selection_note=f"pre: {pre_note}; post: {post_note}",
    )


_BLOCKS = {
    "protocol": (ProtocolParams, "protocol"),
    "security": (SecurityParams, "security"),
    "demand": (DemandParams, "demand"),
}
_COST_FIELD_MAP = {"c_min": "lo", "c_max": "hi", "shape": "shape"}


def replace_field(params: EconomyParams, path: str, value: float) -> EconomyParams:
    """Copy of ``params`` with the scalar at ``path`` (e.g. "security.sigma_eps",
    "costs.c_max") replaced; the copy is unvalidated."""
    block_name, _, field_name = path.partition(".")
    if not field_name:
        raise ParameterError([f"axis path must be 'block.field' (got {path!r})"])
    if block_name in _BLOCKS:
        cls, attr = _BLOCKS[block_name]
        if field_name not in {f.name for f in fields(cls)}:
            raise ParameterError(
                [f"unknown field {field_name!r} in {block_name} (path {path!r})"]
            )
        kwargs = {f.name: getattr(params, f.name) for f in fields(EconomyParams)}
        kwargs[attr] = replace(getattr(params, attr), **{field_name: value})
        return EconomyParams(**kwargs)
    if block_name == "costs":
        costs = params.costs
        if field_name == "mass":
            new_costs = replace(costs, mass=value)
        elif field_name in _COST_FIELD_MAP and isinstance(
            costs.family, (UniformCosts, PowerCosts)
        ):
            attr = _COST_FIELD_MAP[field_name]
            if attr not in {f.name for f in fields(type(costs.family))}:
                raise ParameterError(
                    [f"cost family {type(costs.family).__name__} has no "
                     f"field {field_name!r}"]
                )
            new_costs = replace(costs, family=replace(costs.family, **{attr: value}))
        else:
            raise ParameterError(
                [f"cannot sweep {path!r} for cost family "
                 f"{type(params.costs.family).__name__}"]
            )
        return EconomyParams(params.protocol, params.security, params.demand,
                             new_costs)
    raise ParameterError([f"unknown parameter block {block_name!r} (path {path!r})"])


def parameter_sweep(
    params: ValidatedEconomyParams,
    axis_field: str,
    grid: list[float],
    scan: ScanConfig | None = None,
) -> SweepResult:
    """Re-solve the economy across an ascending grid of one scalar parameter.

    Grid values that fail validation are recorded as invalid rows and the
    sweep continues. Adjacent valid rows whose equilibrium counts differ
    bracket a bifurcation point, reported as the enclosing interval.
    """
    if scan is None:
        scan = ScanConfig()
    if len(grid) < 1:
        raise ParameterError(["sweep grid must contain at least one value"])
    for i in range(1, len(grid)):
        if not grid[i] > grid[i - 1]:
            raise ParameterError(
                [f"sweep grid must be strictly ascending (index {i})"]
            )

    rows: list[SweepRow] = []
    for value in grid:
        candidate = replace_field(params, axis_field, value)
        try:
            checked = validate(candidate)
        except ParameterError as exc:
            rows.append(SweepRow(axis_value=value, valid=False,
                                 error=str(exc), equilibria=()))
            continue
        outcome = find_equilibria(checked, scan)
        rows.append(SweepRow(axis_value=value, valid=True, error=None,
                             equilibria=outcome.equilibria))

    bifurcations: list[tuple[float, float]] = []
    for left, right in zip(rows, rows[1:]):
        if left.valid and right.valid and len(left.equilibria) != len(right.equilibria):
            bifurcations.append((left.axis_value, right.axis_value))

    return SweepResult(
        axis_field=axis_field,
        grid=tuple(grid),
        rows=tuple(rows),
        bifurcation_points=tuple(bifurcations),
    )
