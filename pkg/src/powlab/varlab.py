"""Synthetic weekly dynamics, VAR estimation, and lead-lag diagnostics.

The weekly law of motion makes the static model dynamic: demand and fee
shifters follow AR(1) processes in logs, hashrate partially adjusts toward
its free-entry level at last week's price (rig deployment reacts to prices
with a lag), and the asset market then clears at the current hashrate. This
ordering is what generates the price-leads-hashrate structure in weekly
data: the price-to-hashrate link enters lagged while the security feedback
from hashrate to price is contemporaneous. A protocol halving cuts the block
subsidy permanently and switches on an exogenous dummy, giving the estimated
VAR an observed structural regressor.

All randomness flows from numpy's PCG64 generator seeded by the spec, with
two standard-normal draws per week (demand innovation first, then fee
innovation), so any run is reproducible bit-for-bit from the seed.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import f as f_dist

from .demand import total_demand
from .equilibrium import STABLE, ScanConfig, find_equilibria
from .errors import (
    DatasetError,
    DomainError,
    EstimationError,
    ParameterError,
    SimulationError,
)
from .hashsupply import solve_hash_supply
from .params import ValidatedEconomyParams
from .rootfind import brent
from .security import safety

VAR_NAMES = ("log_P", "log_H", "log_Phi")

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Ar1Spec:
    """AR(1) process in logs: x' = mean + persistence*(x - mean) + sd*eps.

    ``mean=None`` centres the process on the corresponding economy parameter.
    """

    persistence: float
    sd: float
    mean: float | None = None

    def __post_init__(self):
        problems = []
        if not 0.0 <= self.persistence < 1.0:
            problems.append(
                f"persistence must be in [0, 1) (got {self.persistence!r})"
            )
        if not self.sd >= 0.0:
            problems.append(f"sd must be >= 0 (got {self.sd!r})")
        if self.mean is not None and not math.isfinite(self.mean):
            problems.append(f"mean must be finite (got {self.mean!r})")
        if problems:
            raise ParameterError(problems)


@dataclass(frozen=True)
class DynamicsSpec:
    """Configuration of one synthetic weekly run."""

    T: int
    lambda_adj: float
    theta_u_shock: Ar1Spec
    fee_process: Ar1Spec
    halving_week: int | None = None
    seed: int = 0

    def __post_init__(self):
        problems = []
        if not (isinstance(self.T, int) and self.T >= 50):
            problems.append(f"T must be an int >= 50 (got {self.T!r})")
        if not 0.0 < self.lambda_adj <= 1.0:
            problems.append(f"lambda_adj must be in (0, 1] (got {self.lambda_adj!r})")
        if self.halving_week is not None:
            if not (isinstance(self.halving_week, int)
                    and 0 <= self.halving_week < (self.T if isinstance(self.T, int) else 0)):
                problems.append(
                    f"halving_week must be an int in [0, T) (got {self.halving_week!r})"
                )
        if not (isinstance(self.seed, int) and self.seed >= 0):
            problems.append(f"seed must be a non-negative int (got {self.seed!r})")
        if problems:
            raise ParameterError(problems)


@dataclass(frozen=True)
class VarDataset:
    """Weekly log series plus the halving dummy."""

    log_P: np.ndarray
    log_H: np.ndarray
    log_Phi: np.ndarray
    exog_halving: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("log_P", "log_H", "log_Phi", "exog_halving"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.log_P)
        for name in ("log_H", "log_Phi", "exog_halving"):
            if len(getattr(self, name)) != n:
                raise DatasetError(
                    f"column {name} has length {len(getattr(self, name))}, expected {n}"
                )
        for name in ("log_P", "log_H", "log_Phi"):
            col = getattr(self, name)
            if n and not np.isfinite(col).all():
                bad = int(np.flatnonzero(~np.isfinite(col))[0])
                raise DatasetError(f"column {name} is not finite at row {bad}")
        if n and not np.isin(self.exog_halving, (0.0, 1.0)).all():
            bad = int(np.flatnonzero(~np.isin(self.exog_halving, (0.0, 1.0)))[0])
            raise DatasetError(
                f"halving_dummy must be 0 or 1 (row {bad}: {self.exog_halving[bad]!r})"
            )

    def __len__(self) -> int:
        return len(self.log_P)


@dataclass(frozen=True)
class VarModel:
    """Per-equation OLS fit of the three-variable system with the halving dummy."""

    lag_order: int
    var_names: tuple[str, ...]
    coef_lags: tuple[np.ndarray, ...]
    intercepts: np.ndarray
    halving_loading: np.ndarray
    resid_cov: np.ndarray
    spectral_radius: float
    coefficients: np.ndarray
    coef_stderr: np.ndarray
    coef_labels: tuple[str, ...]
    n_obs: int


@dataclass(frozen=True)
class ImpulseResponse:
    """Dynamic multipliers of a unit permanent halving-dummy switch."""

    horizons: np.ndarray
    responses: np.ndarray  # (horizon + 1, 3), columns follow var_names
    var_names: tuple[str, ...]
    sign_short_run: dict
    sign_long_run: dict
    non_stationary: bool


@dataclass(frozen=True)
class GrangerLag:
    lag: int
    f_stat: float
    p_value: float
    incremental_r2: float


@dataclass(frozen=True)
class GrangerDirection:
    source: str
    target: str
    by_lag: tuple[GrangerLag, ...]
    incremental_r2: float  # at the full lag order


@dataclass(frozen=True)
class GrangerReport:
    max_lag: int
    directions: tuple[GrangerDirection, ...]

    def direction(self, source: str, target: str) -> GrangerDirection:
        for d in self.directions:
            if d.source == source and d.target == target:
                return d
        raise KeyError(f"no direction {source}->{target}")


def _clear_market(params: ValidatedEconomyParams, h_lag: float,
                  p_guess: float, week: int) -> float:
    """Price clearing demand against Q with the hashrate held fixed."""
    Q = params.protocol.Q
    sec, dem = params.security, params.demand

    def excess_fixed_h(p: float) -> float:
        return total_demand(dem, p, safety(sec, p, h_lag).safety).d_total - Q

    lo = hi = p_guess
    flo = fhi = excess_fixed_h(p_guess)
    for _ in range(120):
        if flo > 0.0:
            break
        lo /= 2.0
        if lo < 1e-15:
            raise SimulationError(
                f"market clearing failed in week {week}: no excess demand above "
                f"P={lo!r} (H={h_lag!r})"
            )
        flo = excess_fixed_h(lo)
    for _ in range(120):
        if fhi < 0.0:
            break
        hi *= 2.0
        if hi > 1e18:
            raise SimulationError(
                f"market clearing failed in week {week}: excess demand still "
                f"positive at P={hi!r} (H={h_lag!r})"
            )
        fhi = excess_fixed_h(hi)
    if flo <= 0.0 or fhi >= 0.0:
        raise SimulationError(
            f"market clearing failed in week {week}: could not bracket a root "
            f"(H={h_lag!r})"
        )
    result = brent(excess_fixed_h, lo, hi, flo, fhi,
                   rtol=1e-13, ftol=1e-10 * Q, max_iter=200)
    if not result.converged:
        raise SimulationError(
            f"market clearing did not converge in week {week}: bracket "
            f"{result.bracket!r}, residual {result.f_root!r}"
        )
    return result.root


def simulate_economy(
    params: ValidatedEconomyParams,
    spec: DynamicsSpec,
    scan: ScanConfig | None = None,
) -> VarDataset:
    """Simulate ``spec.T`` weeks starting from the deterministic equilibrium.

    The starting point is the unique stable equilibrium of the economy with
    the demand scale and fee level at their process means (the baseline
    parameters themselves when the AR(1) means are left unset); a missing or
    unstable equilibrium raises SimulationError.
    """
    proto, sec, dem, costs = (params.protocol, params.security,
                              params.demand, params.costs)
    if spec.theta_u_shock.mean is not None:
        theta_mean = spec.theta_u_shock.mean
    else:
        theta_mean = math.log(dem.theta_U)
    if spec.fee_process.mean is not None:
        phi_mean = spec.fee_process.mean
    else:
        if proto.Phi <= 0.0:
            raise SimulationError(
                "fee process needs an explicit mean when Phi is 0"
            )
        phi_mean = math.log(proto.Phi)

    base = ValidatedEconomyParams(
        replace(proto, Phi=math.exp(phi_mean)),
        sec,
        replace(dem, theta_U=math.exp(theta_mean)),
        costs,
    )
    outcome = find_equilibria(base, scan)
    if len(outcome.equilibria) != 1 or outcome.equilibria[0].stability != STABLE:
        raise SimulationError(
            f"baseline economy must have a unique stable equilibrium "
            f"(found {len(outcome.equilibria)}: "
            f"{[e.stability for e in outcome.equilibria]})"
        )
    price = outcome.equilibria[0].P_star
    hashrate = outcome.equilibria[0].H_star

    rho_u, sd_u = spec.theta_u_shock.persistence, spec.theta_u_shock.sd
    rho_f, sd_f = spec.fee_process.persistence, spec.fee_process.sd
    rng = np.random.default_rng(spec.seed)

    log_theta = theta_mean
    log_phi = phi_mean
    subsidy = proto.B
    log_p = np.empty(spec.T)
    log_h = np.empty(spec.T)
    log_fee = np.empty(spec.T)
    dummy = np.zeros(spec.T)

    for week in range(spec.T):
        log_theta = theta_mean + rho_u * (log_theta - theta_mean) \
            + sd_u * rng.standard_normal()
        log_phi = phi_mean + rho_f * (log_phi - phi_mean) \
            + sd_f * rng.standard_normal()
        theta_t, phi_t = math.exp(log_theta), math.exp(log_phi)
        if not (math.isfinite(theta_t) and math.isfinite(phi_t)):
            raise SimulationError(f"shock process overflowed in week {week}")
        if spec.halving_week is not None and week == spec.halving_week:
            subsidy = proto.B / 2.0
        # Values are strictly positive by construction, so the weekly economy
        # satisfies every invariant without a validation pass.
        econ_t = ValidatedEconomyParams(
            replace(proto, B=subsidy, Phi=phi_t),
            sec,
            replace(dem, theta_U=theta_t),
            costs,
        )
        # Miners respond to last week's price under this week's revenue
        # conditions; the market then clears at the adjusted hashrate.
        target = solve_hash_supply(econ_t, price, h_init=hashrate).H
        hashrate = hashrate + spec.lambda_adj * (target - hashrate)
        price = _clear_market(econ_t, hashrate, price, week)
        log_p[week] = math.log(price)
        log_h[week] = math.log(hashrate)
        log_fee[week] = log_phi
        if spec.halving_week is not None and week >= spec.halving_week:
            dummy[week] = 1.0

    meta = {
        "source": "synthetic",
        "seed": str(spec.seed),
        "rng": "numpy PCG64 (default_rng), two standard-normal draws per week",
    }
    return VarDataset(log_p, log_h, log_fee, dummy, meta)


def _design_matrix(data: VarDataset, p: int):
    y = np.column_stack([data.log_P, data.log_H, data.log_Phi])
    n_obs = len(data) - p
    cols = 3 * p + 2
    X = np.empty((n_obs, cols))
    X[:, 0] = 1.0
    labels = ["const"]
    for lag in range(1, p + 1):
        X[:, 1 + 3 * (lag - 1): 1 + 3 * lag] = y[p - lag: len(data) - lag]
        labels.extend(f"{name}.l{lag}" for name in VAR_NAMES)
    X[:, -1] = data.exog_halving[p:]
    labels.append("halving_dummy")
    return y[p:], X, tuple(labels)


def _collinear_columns(X: np.ndarray, labels: tuple[str, ...]) -> list[str]:
    _, s, vt = np.linalg.svd(X, full_matrices=False)
    tol = _RANK_RTOL * s[0]
    names: list[str] = []
    for i, sv in enumerate(s):
        if sv <= tol:
            v = np.abs(vt[i])
            involved = np.flatnonzero(v > 0.1 * v.max())
            names.extend(labels[j] for j in involved if labels[j] not in names)
    return names


def estimate_var(data: VarDataset, p: int = 2) -> VarModel:
    """Per-equation OLS of the three series on ``p`` lags, an intercept, and
    the halving dummy; residual covariance uses the degrees-of-freedom
    corrected divisor."""
    if not (isinstance(p, int) and p >= 1):
        raise EstimationError(f"lag order must be an int >= 1 (got {p!r})")
    n_obs = len(data) - p
    needed = 10 * (3 * p + 2)
    if n_obs < needed:
        raise EstimationError(
            f"need T - p >= {needed} observations for p={p} (got {n_obs})"
        )
    Y, X, labels = _design_matrix(data, p)

    bad = _collinear_columns(X, labels)
    if bad:
        raise EstimationError(f"collinear regressor columns: {', '.join(bad)}")

    beta, _, _, _ = np.linalg.lstsq(X, Y, rcond=None)
    resid = Y - X @ beta
    dof = n_obs - X.shape[1]
    resid_cov = resid.T @ resid / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    stderr = np.sqrt(np.outer(np.diag(xtx_inv), np.diag(resid_cov)))

    coef_lags = tuple(
        beta[1 + 3 * (lag - 1): 1 + 3 * lag, :].T.copy() for lag in range(1, p + 1)
    )
    companion = np.zeros((3 * p, 3 * p))
    for lag, A in enumerate(coef_lags):
        companion[:3, 3 * lag: 3 * (lag + 1)] = A
    if p > 1:
        companion[3:, :-3] = np.eye(3 * (p - 1))

    return VarModel(
        lag_order=p,
        var_names=VAR_NAMES,
        coef_lags=coef_lags,
        intercepts=beta[0, :].copy(),
        halving_loading=beta[-1, :].copy(),
        resid_cov=resid_cov,
        spectral_radius=_spectral_radius(companion),
        coefficients=beta,
        coef_stderr=stderr,
        coef_labels=labels,
        n_obs=n_obs,
    )


def _spectral_radius(F: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest eigenvalue modulus via two-column subspace (power) iteration.

    The two-dimensional block captures complex-conjugate dominant pairs of
    the real companion matrix; the modulus comes from the 2x2 Rayleigh
    quotient in closed form. Falls back to a dense eigenvalue solve if the
    estimate has not settled within the iteration cap.
    """
    n = F.shape[0]
    if n == 1:
        return abs(float(F[0, 0]))
    start = np.random.default_rng(0).standard_normal((n, 2))
    q, _ = np.linalg.qr(start)
    rho_prev = math.inf
    for _ in range(max_iter):
        z = F @ q
        q, _ = np.linalg.qr(z)
        t = q.T @ F @ q
        tr = t[0, 0] + t[1, 1]
        det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            root = math.sqrt(disc)
            rho = max(abs((tr + root) / 2.0), abs((tr - root) / 2.0))
        else:
            rho = math.sqrt(det)
        if abs(rho - rho_prev) <= tol * max(1.0, rho):
            return rho
        rho_prev = rho
    return float(np.max(np.abs(np.linalg.eigvals(F))))


def impulse_response(model: VarModel, horizon: int = 52) -> ImpulseResponse:
    """Response paths to a permanent unit switch of the halving dummy.

    Horizon 0 equals the impact loading. A spectral radius at or above one
    flags the paths as non-stationary but still computes them.
    """
    if not (isinstance(horizon, int) and horizon >= 0):
        raise DomainError(f"horizon must be an int >= 0 (got {horizon!r})")
    p = model.lag_order
    resp = np.zeros((horizon + 1, 3))
    for t in range(horizon + 1):
        acc = model.halving_loading.copy()
        for lag in range(1, p + 1):
            if t - lag >= 0:
                acc += model.coef_lags[lag - 1] @ resp[t - lag]
        resp[t] = acc

    def window_sign(lo: int, hi: int) -> dict:
        out = {}
        hi = min(hi, horizon)
        for j, name in enumerate(model.var_names):
            if lo > hi:
                out[name] = "n/a"
            elif (resp[lo: hi + 1, j] < 0.0).all():
                out[name] = "negative"
            elif (resp[lo: hi + 1, j] > 0.0).all():
                out[name] = "positive"
            else:
                out[name] = "mixed"
        return out

    return ImpulseResponse(
        horizons=np.arange(horizon + 1),
        responses=resp,
        var_names=model.var_names,
        sign_short_run=window_sign(1, 8),
        sign_long_run=window_sign(26, 52),
        non_stationary=model.spectral_radius >= 1.0,
    )


def _rss(X: np.ndarray, y: np.ndarray) -> float:
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    r = y - X @ beta
    return float(r @ r)


def granger_lead_lag(data: VarDataset, max_lag: int = 4) -> GrangerReport:
    """Bivariate lag-exclusion F tests between log price and log hashrate.

    For each direction and each lag order L, the unrestricted regression adds
    L lags of the other series to an own-lags-plus-intercept model; the
    report carries the F statistic, its p-value, and the incremental R^2,
    with the direction-level summary taken at the full lag order.

    When the halving dummy varies in-sample it enters both regressions as an
    exogenous control: the event is an observed structural break, and leaving
    it out would credit whichever series steps most sharply with spurious
    predictive power over the other. Lag matrices may be collinear by
    construction (e.g. a series that is an exact lagged copy), so the fits
    use least-squares projections, which stay well defined there.
    """
    if not (isinstance(max_lag, int) and max_lag >= 1):
        raise EstimationError(f"max_lag must be an int >= 1 (got {max_lag!r})")
    T = len(data)
    needed = 10 * (2 * max_lag + 1)
    if T - max_lag < needed:
        raise EstimationError(
            f"need T - max_lag >= {needed} observations for max_lag={max_lag} "
            f"(got {T - max_lag})"
        )
    dummy = data.exog_halving
    use_dummy = len(data) > 0 and dummy.max() > dummy.min()
    series = {"log_P": data.log_P, "log_H": data.log_H}
    directions = []
    for source, target in (("log_P", "log_H"), ("log_H", "log_P")):
        x, y = series[source], series[target]
        rows = []
        for lag in range(1, max_lag + 1):
            y_t = y[lag:]
            n = len(y_t)
            controls = [np.ones(n)]
            if use_dummy:
                controls.append(dummy[lag:])
            own = np.column_stack(controls +
                                  [y[lag - j: T - j] for j in range(1, lag + 1)])
            cross = np.column_stack([x[lag - j: T - j] for j in range(1, lag + 1)])
            tss = float(np.sum((y_t - y_t.mean()) ** 2))
            if tss <= 0.0:
                raise EstimationError(f"series {target} is constant")
            rss_r = _rss(own, y_t)
            rss_u = _rss(np.column_stack([own, cross]), y_t)
            gain = max(0.0, rss_r - rss_u)
            df_den = n - (2 * lag + len(controls))
            if rss_u <= 1e-300 * max(1.0, tss):
                f_stat = math.inf if gain > 0.0 else 0.0
            else:
                f_stat = (gain / lag) / (rss_u / df_den)
            p_value = float(f_dist.sf(f_stat, lag, df_den)) if math.isfinite(f_stat) else 0.0
            rows.append(GrangerLag(lag=lag, f_stat=f_stat, p_value=p_value,
                                   incremental_r2=gain / tss))
        directions.append(GrangerDirection(
            source=source, target=target, by_lag=tuple(rows),
            incremental_r2=rows[-1].incremental_r2,
        ))
    return GrangerReport(max_lag=max_lag, directions=tuple(directions))


_CSV_COLUMNS = ("week", "log_P", "log_H", "log_Phi", "halving_dummy")


def load_dataset(path: str | os.PathLike) -> VarDataset:
    """Read a weekly dataset from CSV with columns week, log_P, log_H,
    log_Phi, halving_dummy (any column order); malformed rows report their
    line number."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, expected a header row") from None
        missing = set(_CSV_COLUMNS) - set(header)
        extra = set(header) - set(_CSV_COLUMNS)
        if missing:
            raise DatasetError(f"{path}: missing column(s) {sorted(missing)}")
        if extra:
            raise DatasetError(f"{path}: unexpected column(s) {sorted(extra)}")
        index = {name: header.index(name) for name in _CSV_COLUMNS}
        cols: dict[str, list[float]] = {name: [] for name in _CSV_COLUMNS}
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {line_no}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            for name in _CSV_COLUMNS:
                raw = row[index[name]]
                try:
                    value = float(raw)
                except ValueError:
                    raise DatasetError(
                        f"{path}: line {line_no}: column {name}: "
                        f"not a number ({raw!r})"
                    ) from None
                cols[name].append(value)
        for name in ("log_P", "log_H", "log_Phi"):
            for i, value in enumerate(cols[name]):
                if not math.isfinite(value):
                    raise DatasetError(
                        f"{path}: line {i + 2}: column {name}: "
                        f"value must be finite (got {value!r})"
                    )
        for i, value in enumerate(cols["halving_dummy"]):
            if value not in (0.0, 1.0):
                raise DatasetError(
                    f"{path}: line {i + 2}: column halving_dummy: "
                    f"must be 0 or 1 (got {value!r})"
                )
    return VarDataset(
        log_P=np.array(cols["log_P"]),
        log_H=np.array(cols["log_H"]),
        log_Phi=np.array(cols["log_Phi"]),
        exog_halving=np.array(cols["halving_dummy"]),
        meta={"source": str(path)},
    )
