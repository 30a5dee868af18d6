"""Halving comparative statics and parameter sweeps."""

import dataclasses

import pytest

import powlab as pl
from conftest import make_economy


class TestApplyHalving:
    def test_halves_subsidy(self):
        economy = make_economy(B=6.25)
        assert pl.apply_halving(economy).protocol.B == 3.125

    def test_everything_else_identical(self):
        economy = make_economy(B=6.25, Phi=0.7)
        halved = pl.apply_halving(economy)
        changed = [
            name for block in ("protocol", "security", "demand", "costs")
            for name, before, after in (
                (f"{block}.{f.name}",
                 getattr(getattr(economy, block), f.name),
                 getattr(getattr(halved, block), f.name))
                for f in dataclasses.fields(getattr(economy, block))
            )
            if before != after
        ]
        assert changed == ["protocol.B"]

    def test_composes(self):
        economy = make_economy(B=6.25)
        assert pl.apply_halving(pl.apply_halving(economy)).protocol.B == 1.5625

    def test_zero_subsidy_rejected(self):
        economy = make_economy(B=0.0, Phi=0.5)
        with pytest.raises(pl.DomainError):
            pl.apply_halving(economy)

    def test_result_stays_validated(self):
        halved = pl.apply_halving(make_economy())
        assert isinstance(halved, pl.ValidatedEconomyParams)


class TestHalvingReport:
    def test_contraction_with_active_feedback(self, feedback_economies, test_scan):
        for economy in feedback_economies:
            report = pl.halving_report(economy, test_scan)
            assert report.delta_P < 0.0
            assert report.delta_H < 0.0
            assert report.delta_sigma < 0.0
            assert report.selection_note == \
                "pre: unique equilibrium; post: unique equilibrium"

    def test_mechanism_isolation(self, limiting_economy, test_scan):
        # with the security channel switched off the price barely moves
        report = pl.halving_report(limiting_economy, test_scan)
        assert report.delta_H < 0.0
        assert abs(report.delta_P) < 1e-6

    def test_deltas_are_differences(self, baseline_economy, test_scan):
        report = pl.halving_report(baseline_economy, test_scan)
        assert report.delta_P == report.post.P_star - report.pre.P_star
        assert report.delta_H == report.post.H_star - report.pre.H_star
        assert report.delta_sigma == report.post.sigma_star - report.pre.sigma_star

    def test_negligible_subsidy_is_noop(self, test_scan):
        # fees dominate, so halving the (tiny) subsidy moves nothing measurable
        economy = make_economy(B=1e-12, Phi=0.25)
        report = pl.halving_report(economy, test_scan)
        assert report.delta_P == pytest.approx(0.0, abs=1e-9)
        assert report.delta_H == pytest.approx(0.0, abs=1e-9)

    def test_multiplicity_selection_note(self, multiplicity_economy, test_scan):
        report = pl.halving_report(multiplicity_economy, test_scan)
        assert "highest-P stable of 3" in report.selection_note

    def test_no_equilibrium_raises(self, test_scan):
        economy = make_economy(Q=1e9)
        with pytest.raises(pl.ScenarioError, match="no pre-halving equilibrium"):
            pl.halving_report(economy, test_scan)


class TestReplaceField:
    def test_scalar_blocks(self, baseline_economy):
        changed = pl.replace_field(baseline_economy, "security.sigma_eps", 7.5)
        assert changed.security.sigma_eps == 7.5
        assert changed.protocol == baseline_economy.protocol

    def test_cost_fields(self, baseline_economy):
        assert pl.replace_field(baseline_economy, "costs.mass", 5.0).costs.mass == 5.0
        changed = pl.replace_field(baseline_economy, "costs.c_max", 2.0)
        assert changed.costs.family.hi == 2.0
        changed = pl.replace_field(baseline_economy, "costs.shape", 1.5)
        assert changed.costs.family.shape == 1.5

    def test_returns_unvalidated_copy(self, baseline_economy):
        changed = pl.replace_field(baseline_economy, "protocol.B", -1.0)
        assert not isinstance(changed, pl.ValidatedEconomyParams)

    def test_unknown_paths_rejected(self, baseline_economy):
        for path in ("protocol.X", "weird.B", "protocol", "costs.knots"):
            with pytest.raises(pl.ParameterError):
                pl.replace_field(baseline_economy, path, 1.0)

    def test_shape_on_uniform_family_rejected(self, limiting_economy):
        with pytest.raises(pl.ParameterError):
            pl.replace_field(limiting_economy, "costs.shape", 2.0)


class TestParameterSweep:
    SIGMA_GRID = [0.15, 0.2, 0.3, 0.5, 1.0, 5.0, 100.0, 1e6, 1e9]

    def test_sigma_sweep_finds_bifurcation(self, multiplicity_economy, test_scan):
        result = pl.parameter_sweep(multiplicity_economy, "security.sigma_eps",
                                    self.SIGMA_GRID, test_scan)
        counts = [len(r.equilibria) for r in result.rows]
        assert counts[0] == 3
        assert counts[-1] == 1
        assert result.bifurcation_points
        lo, hi = result.bifurcation_points[0]
        assert (lo, hi) == (0.15, 0.2)

    def test_sweep_determinism(self, multiplicity_economy, test_scan):
        first = pl.parameter_sweep(multiplicity_economy, "security.sigma_eps",
                                   self.SIGMA_GRID, test_scan)
        second = pl.parameter_sweep(multiplicity_economy, "security.sigma_eps",
                                    self.SIGMA_GRID, test_scan)
        assert first == second

    def test_supply_increase_weakly_lowers_price(self, baseline_economy,
                                                 test_scan):
        grid = [10.0, 15.0, 20.0, 30.0, 50.0]
        result = pl.parameter_sweep(baseline_economy, "protocol.Q", grid,
                                    test_scan)
        prices = [row.equilibria[0].P_star for row in result.rows]
        assert all(len(row.equilibria) == 1 for row in result.rows)
        assert all(b <= a for a, b in zip(prices, prices[1:]))

    def test_invalid_row_continues(self, baseline_economy, test_scan):
        result = pl.parameter_sweep(baseline_economy, "security.sigma_eps",
                                    [-1.0, 5.0], test_scan)
        assert not result.rows[0].valid
        assert "sigma_eps must be > 0" in result.rows[0].error
        assert result.rows[0].equilibria == ()
        assert result.rows[1].valid
        assert result.bifurcation_points == ()

    def test_single_point_grid(self, baseline_economy, test_scan):
        result = pl.parameter_sweep(baseline_economy, "protocol.Q", [20.0],
                                    test_scan)
        assert len(result.rows) == 1
        assert result.bifurcation_points == ()

    def test_grid_must_ascend(self, baseline_economy, test_scan):
        with pytest.raises(pl.ParameterError, match="ascending"):
            pl.parameter_sweep(baseline_economy, "protocol.Q", [2.0, 1.0],
                               test_scan)
