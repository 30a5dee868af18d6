"""Shared fixtures: frozen reference economies and the synthetic ensemble."""

from __future__ import annotations

import time

import pytest

import powlab as pl


def make_economy(B=0.2, Phi=0.05, Q=10.0, g=1.0, k=1.0, sigma_eps=1e9,
                 s_star=0.0, theta_U=20.0, eps=1.0, theta_S=0.0, delta=0.0,
                 family=None, mass=1.0) -> pl.ValidatedEconomyParams:
    if family is None:
        family = pl.UniformCosts(0.0, 1.0)
    return pl.validate(pl.EconomyParams(
        pl.ProtocolParams(B=B, Phi=Phi, Q=Q),
        pl.SecurityParams(g=g, k=k, sigma_eps=sigma_eps, s_star=s_star),
        pl.DemandParams(theta_U=theta_U, eps=eps, theta_S=theta_S, delta=delta),
        pl.MinerCostModel(family, mass=mass),
    ))


@pytest.fixture
def limiting_economy():
    """Security feedback switched off by a huge signal noise; P* = 1."""
    return make_economy()


@pytest.fixture
def baseline_economy():
    """Unique stable equilibrium with an active security channel."""
    return make_economy(B=0.25, Phi=0.05, Q=20.0, g=1.0, k=2.0, sigma_eps=5.0,
                        theta_U=50.0, eps=1.0, theta_S=5.0, delta=1.0,
                        family=pl.PowerCosts(0.0, 1.0, 2.0), mass=2.0)


@pytest.fixture
def feedback_economies(baseline_economy):
    """Three economies with an active security channel and unique equilibria."""
    return [
        baseline_economy,
        make_economy(sigma_eps=10.0),
        make_economy(B=1.0, Phi=0.2, Q=30.0, g=0.5, k=1.5, sigma_eps=20.0,
                     theta_U=80.0, eps=0.8, theta_S=10.0, delta=3.0,
                     family=pl.UniformCosts(0.1, 1.5), mass=3.0),
    ]


@pytest.fixture
def multiplicity_economy():
    """Strong, sharp security feedback: three equilibria (stable/unstable/stable)."""
    return make_economy(Q=60.0, k=4.0, sigma_eps=0.15, s_star=-0.5,
                        theta_U=25.0, theta_S=40.0, delta=20.0)


@pytest.fixture
def test_scan():
    """Default window at a grid size that keeps the suite fast."""
    return pl.ScanConfig(n_grid=512)


ENSEMBLE_SEEDS = tuple(range(50))


def ensemble_spec(seed: int) -> pl.DynamicsSpec:
    return pl.DynamicsSpec(
        T=600,
        lambda_adj=0.8,
        theta_u_shock=pl.Ar1Spec(persistence=0.8, sd=0.03),
        fee_process=pl.Ar1Spec(persistence=0.8, sd=0.005),
        halving_week=300,
        seed=seed,
    )


@pytest.fixture(scope="session")
def synthetic_ensemble():
    """Datasets/models/IRFs/lead-lag reports for the 50-seed baseline ensemble."""
    start = time.perf_counter()
    economy = make_economy(B=0.25, Phi=0.05, Q=20.0, g=1.0, k=2.0,
                           sigma_eps=5.0, theta_U=50.0, eps=1.0, theta_S=5.0,
                           delta=1.0, family=pl.PowerCosts(0.0, 1.0, 2.0),
                           mass=2.0)
    scan = pl.ScanConfig(n_grid=512)
    runs = []
    for seed in ENSEMBLE_SEEDS:
        data = pl.simulate_economy(economy, ensemble_spec(seed), scan)
        model = pl.estimate_var(data, 2)
        irf = pl.impulse_response(model, 52)
        granger = pl.granger_lead_lag(data, 4)
        runs.append({"seed": seed, "data": data, "model": model,
                     "irf": irf, "granger": granger})
    elapsed = time.perf_counter() - start
    return {"economy": economy, "scan": scan, "runs": runs,
            "build_seconds": elapsed}
