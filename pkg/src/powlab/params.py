"""Parameter types for a proof-of-work asset economy.

An economy is described by four immutable blocks: protocol constants, attack
and signal parameters, demand parameters, and the miner cost distribution.
``validate`` checks every invariant at once and returns a
:class:`ValidatedEconomyParams`, the only type the solvers accept.
"""

from __future__ import annotations

import json
import math
import numbers
from bisect import bisect_left
from dataclasses import dataclass, fields

from .errors import ParameterError

__all__ = [
    "ProtocolParams",
    "SecurityParams",
    "DemandParams",
    "UniformCosts",
    "PowerCosts",
    "PiecewiseLinearCosts",
    "MinerCostModel",
    "EconomyParams",
    "ValidatedEconomyParams",
    "validate",
    "economy_to_dict",
    "economy_from_dict",
    "economy_to_json",
    "economy_from_json",
]


@dataclass(frozen=True)
class ProtocolParams:
    """Protocol-level constants: block subsidy, mean fees, total supply."""

    B: float
    Phi: float
    Q: float


@dataclass(frozen=True)
class SecurityParams:
    """Attacker payoff/cost coefficients and private-signal parameters."""

    g: float
    k: float
    sigma_eps: float
    s_star: float = 0.0


@dataclass(frozen=True)
class DemandParams:
    """User and speculator demand parameters."""

    theta_U: float
    eps: float
    theta_S: float = 0.0
    delta: float = 0.0


class _CostFamily:
    """Interface shared by the cost-distribution families.

    ``unit_cdf`` maps cost to cumulative fraction in [0, 1], ``unit_quantile``
    is its inverse on [0, 1], and ``unit_density`` is the derivative on the
    open support. Mass scaling lives in the hash-supply module.
    """

    @property
    def c_min(self) -> float:
        raise NotImplementedError

    @property
    def c_max(self) -> float:
        raise NotImplementedError

    def unit_cdf(self, c: float) -> float:
        raise NotImplementedError

    def unit_quantile(self, u: float) -> float:
        raise NotImplementedError

    def unit_density(self, c: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformCosts(_CostFamily):
    """Costs uniform on [c_min, c_max]."""

    lo: float
    hi: float

    @property
    def c_min(self) -> float:
        return self.lo

    @property
    def c_max(self) -> float:
        return self.hi

    def unit_cdf(self, c: float) -> float:
        if c <= self.lo:
            return 0.0
        if c >= self.hi:
            return 1.0
        return (c - self.lo) / (self.hi - self.lo)

    def unit_quantile(self, u: float) -> float:
        return self.lo + u * (self.hi - self.lo)

    def unit_density(self, c: float) -> float:
        return 1.0 / (self.hi - self.lo)


@dataclass(frozen=True)
class PowerCosts(_CostFamily):
    """Cumulative fraction ((c - c_min)/(c_max - c_min)) ** shape."""

    lo: float
    hi: float
    shape: float

    @property
    def c_min(self) -> float:
        return self.lo

    @property
    def c_max(self) -> float:
        return self.hi

    def unit_cdf(self, c: float) -> float:
        if c <= self.lo:
            return 0.0
        if c >= self.hi:
            return 1.0
        return ((c - self.lo) / (self.hi - self.lo)) ** self.shape

    def unit_quantile(self, u: float) -> float:
        if u <= 0.0:
            return self.lo
        if u >= 1.0:
            return self.hi
        return self.lo + (self.hi - self.lo) * u ** (1.0 / self.shape)

    def unit_density(self, c: float) -> float:
        width = self.hi - self.lo
        frac = (c - self.lo) / width
        if frac <= 0.0:
            # Float-rounded edge evaluation; return the one-sided limit.
            if self.shape == 1.0:
                return 1.0 / width
            return float("inf") if self.shape < 1.0 else 0.0
        return self.shape * frac ** (self.shape - 1.0) / width


@dataclass(frozen=True)
class PiecewiseLinearCosts(_CostFamily):
    """CDF interpolated linearly through (cost, cumulative fraction) knots.

    At interior knot points the density of the left segment applies.
    """

    knots: tuple[tuple[float, float], ...]

    @property
    def c_min(self) -> float:
        return self.knots[0][0]

    @property
    def c_max(self) -> float:
        return self.knots[-1][0]

    def _segment(self, values: tuple[float, ...], x: float) -> int:
        j = bisect_left(values, x)
        return min(max(j, 1), len(values) - 1)

    def unit_cdf(self, c: float) -> float:
        cs = tuple(k[0] for k in self.knots)
        fs = tuple(k[1] for k in self.knots)
        if c <= cs[0]:
            return 0.0
        if c >= cs[-1]:
            return 1.0
        j = self._segment(cs, c)
        slope = (fs[j] - fs[j - 1]) / (cs[j] - cs[j - 1])
        return fs[j - 1] + (c - cs[j - 1]) * slope

    def unit_quantile(self, u: float) -> float:
        cs = tuple(k[0] for k in self.knots)
        fs = tuple(k[1] for k in self.knots)
        if u <= 0.0:
            return cs[0]
        if u >= 1.0:
            return cs[-1]
        j = self._segment(fs, u)
        slope = (fs[j] - fs[j - 1]) / (cs[j] - cs[j - 1])
        return cs[j - 1] + (u - fs[j - 1]) / slope

    def unit_density(self, c: float) -> float:
        cs = tuple(k[0] for k in self.knots)
        fs = tuple(k[1] for k in self.knots)
        j = self._segment(cs, c)
        return (fs[j] - fs[j - 1]) / (cs[j] - cs[j - 1])


@dataclass(frozen=True)
class MinerCostModel:
    """A cost distribution family together with the total miner mass."""

    family: UniformCosts | PowerCosts | PiecewiseLinearCosts
    mass: float = 1.0

    @property
    def c_min(self) -> float:
        return self.family.c_min

    @property
    def c_max(self) -> float:
        return self.family.c_max


@dataclass(frozen=True)
class EconomyParams:
    """Full parameter bundle defining one economy."""

    protocol: ProtocolParams
    security: SecurityParams
    demand: DemandParams
    costs: MinerCostModel


class ValidatedEconomyParams(EconomyParams):
    """Marker type returned by :func:`validate`.

    Solvers and scenario runners require this type, guaranteeing every
    invariant was checked exactly once at the boundary.
    """


def _require_real(problems: list[str], name: str, value) -> bool:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        problems.append(f"{name} must be a real number (got {value!r})")
        return False
    if not math.isfinite(value):
        problems.append(f"{name} must be finite (got {value!r})")
        return False
    return True


def _check_costs(problems: list[str], costs: MinerCostModel) -> None:
    if _require_real(problems, "mass", costs.mass) and not costs.mass > 0:
        problems.append(f"mass must be > 0 (got {costs.mass!r})")
    fam = costs.family
    if isinstance(fam, (UniformCosts, PowerCosts)):
        ok = _require_real(problems, "c_min", fam.lo)
        ok = _require_real(problems, "c_max", fam.hi) and ok
        if ok:
            if not fam.lo >= 0:
                problems.append(f"c_min must be >= 0 (got {fam.lo!r})")
            if not fam.lo < fam.hi:
                problems.append(
                    f"c_min must be < c_max (got c_min={fam.lo!r}, c_max={fam.hi!r})"
                )
        if isinstance(fam, PowerCosts):
            if _require_real(problems, "shape", fam.shape) and not fam.shape > 0:
                problems.append(f"shape must be > 0 (got {fam.shape!r})")
    elif isinstance(fam, PiecewiseLinearCosts):
        knots = fam.knots
        if len(knots) < 2:
            problems.append(f"knots must contain >= 2 points (got {len(knots)})")
            return
        ok = True
        for i, (c, f) in enumerate(knots):
            ok = _require_real(problems, f"knots[{i}].cost", c) and ok
            ok = _require_real(problems, f"knots[{i}].frac", f) and ok
        if not ok:
            return
        if not knots[0][0] >= 0:
            problems.append(f"c_min must be >= 0 (got {knots[0][0]!r})")
        if knots[0][1] != 0.0:
            problems.append(f"first knot fraction must be 0 (got {knots[0][1]!r})")
        if knots[-1][1] != 1.0:
            problems.append(f"last knot fraction must be 1 (got {knots[-1][1]!r})")
        for i in range(1, len(knots)):
            if not knots[i][0] > knots[i - 1][0]:
                problems.append(f"knot costs must be strictly increasing (at index {i})")
            if not knots[i][1] > knots[i - 1][1]:
                problems.append(
                    f"knot fractions must be strictly increasing (at index {i})"
                )
    else:
        problems.append(f"unknown cost family {type(fam).__name__}")


def validate(params: EconomyParams) -> ValidatedEconomyParams:
    """Check every invariant of ``params``; raise ParameterError listing all
    violations, or return the validated wrapper accepted by the solvers."""
    problems: list[str] = []

    p = params.protocol
    if _require_real(problems, "B", p.B) and not p.B >= 0:
        problems.append(f"B must be >= 0 (got {p.B!r})")
    if _require_real(problems, "Phi", p.Phi) and not p.Phi >= 0:
        problems.append(f"Phi must be >= 0 (got {p.Phi!r})")
    if (
        isinstance(p.B, numbers.Real)
        and isinstance(p.Phi, numbers.Real)
        and not isinstance(p.B, bool)
        and not isinstance(p.Phi, bool)
        and not p.B + p.Phi > 0
    ):
        problems.append(f"B + Phi must be > 0 (got {p.B!r} + {p.Phi!r})")
    if _require_real(problems, "Q", p.Q) and not p.Q > 0:
        problems.append(f"Q must be > 0 (got {p.Q!r})")

    s = params.security
    if _require_real(problems, "g", s.g) and not s.g > 0:
        problems.append(f"g must be > 0 (got {s.g!r})")
    if _require_real(problems, "k", s.k) and not s.k > 0:
        problems.append(f"k must be > 0 (got {s.k!r})")
    if _require_real(problems, "sigma_eps", s.sigma_eps) and not s.sigma_eps > 0:
        problems.append(f"sigma_eps must be > 0 (got {s.sigma_eps!r})")
    _require_real(problems, "s_star", s.s_star)

    d = params.demand
    if _require_real(problems, "theta_U", d.theta_U) and not d.theta_U > 0:
        problems.append(f"theta_U must be > 0 (got {d.theta_U!r})")
    if _require_real(problems, "eps", d.eps) and not d.eps > 0:
        problems.append(f"eps must be > 0 (got {d.eps!r})")
    if _require_real(problems, "theta_S", d.theta_S) and not d.theta_S >= 0:
        problems.append(f"theta_S must be >= 0 (got {d.theta_S!r})")
    if _require_real(problems, "delta", d.delta) and not d.delta >= 0:
        problems.append(f"delta must be >= 0 (got {d.delta!r})")

    _check_costs(problems, params.costs)

    if problems:
        raise ParameterError(problems)
    return ValidatedEconomyParams(
        params.protocol, params.security, params.demand, params.costs
    )


# --- JSON document interface -------------------------------------------------
#
# Field names in the document mirror the dataclass fields. Unknown fields are
# rejected so configs that drift from the schema fail loudly.

_FAMILY_KEYS = {
    "uniform": {"family", "mass", "c_min", "c_max"},
    "power": {"family", "mass", "c_min", "c_max", "shape"},
    "piecewise_linear": {"family", "mass", "knots"},
}


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ParameterError([f"{where} must be a number (got {value!r})"])
    return float(value)


def _expect_keys(doc: dict, expected: set[str], where: str) -> None:
    unknown = set(doc) - expected
    missing = expected - set(doc)
    problems = []
    if unknown:
        problems.append(f"unknown field(s) in {where}: {sorted(unknown)}")
    if missing:
        problems.append(f"missing field(s) in {where}: {sorted(missing)}")
    if problems:
        raise ParameterError(problems)


def economy_to_dict(params: EconomyParams) -> dict:
    fam = params.costs.family
    if isinstance(fam, UniformCosts):
        costs = {"family": "uniform", "mass": params.costs.mass,
                 "c_min": fam.lo, "c_max": fam.hi}
    elif isinstance(fam, PowerCosts):
        costs = {"family": "power", "mass": params.costs.mass,
                 "c_min": fam.lo, "c_max": fam.hi, "shape": fam.shape}
    else:
        costs = {"family": "piecewise_linear", "mass": params.costs.mass,
                 "knots": [[c, f] for c, f in fam.knots]}
    return {
        "protocol": {f.name: getattr(params.protocol, f.name)
                     for f in fields(ProtocolParams)},
        "security": {f.name: getattr(params.security, f.name)
                     for f in fields(SecurityParams)},
        "demand": {f.name: getattr(params.demand, f.name)
                   for f in fields(DemandParams)},
        "costs": costs,
    }


def economy_from_dict(doc: dict) -> EconomyParams:
    if not isinstance(doc, dict):
        raise ParameterError([f"economy document must be an object (got {type(doc).__name__})"])
    _expect_keys(doc, {"protocol", "security", "demand", "costs"}, "economy")

    def block(name: str, cls):
        sub = doc[name]
        if not isinstance(sub, dict):
            raise ParameterError([f"{name} must be an object (got {type(sub).__name__})"])
        names = [f.name for f in fields(cls)]
        _expect_keys(sub, set(names), name)
        return cls(**{n: _as_number(sub[n], f"{name}.{n}") for n in names})

    protocol = block("protocol", ProtocolParams)
    security = block("security", SecurityParams)
    demand = block("demand", DemandParams)

    cdoc = doc["costs"]
    if not isinstance(cdoc, dict):
        raise ParameterError([f"costs must be an object (got {type(cdoc).__name__})"])
    family_name = cdoc.get("family")
    if family_name not in _FAMILY_KEYS:
        raise ParameterError(
            [f"costs.family must be one of {sorted(_FAMILY_KEYS)} (got {family_name!r})"]
        )
    _expect_keys(cdoc, _FAMILY_KEYS[family_name], "costs")
    mass = _as_number(cdoc["mass"], "costs.mass")
    if family_name == "uniform":
        family = UniformCosts(_as_number(cdoc["c_min"], "costs.c_min"),
                              _as_number(cdoc["c_max"], "costs.c_max"))
    elif family_name == "power":
        family = PowerCosts(_as_number(cdoc["c_min"], "costs.c_min"),
                            _as_number(cdoc["c_max"], "costs.c_max"),
                            _as_number(cdoc["shape"], "costs.shape"))
    else:
        knots = cdoc["knots"]
        if not isinstance(knots, list):
            raise ParameterError([f"costs.knots must be a list (got {type(knots).__name__})"])
        parsed = []
        for i, pair in enumerate(knots):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ParameterError([f"costs.knots[{i}] must be a [cost, fraction] pair"])
            parsed.append((_as_number(pair[0], f"costs.knots[{i}][0]"),
                           _as_number(pair[1], f"costs.knots[{i}][1]")))
        family = PiecewiseLinearCosts(tuple(parsed))
    costs = MinerCostModel(family=family, mass=mass)
    return EconomyParams(protocol, security, demand, costs)


def economy_to_json(params: EconomyParams, indent: int | None = 2) -> str:
    return json.dumps(economy_to_dict(params), indent=indent, sort_keys=True)


def economy_from_json(text: str) -> EconomyParams:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError([f"invalid JSON: {exc}"]) from exc
    return economy_from_dict(doc)
