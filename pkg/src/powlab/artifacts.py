"""Artifact serialization: delimited text and JSON with stable formatting.

Floats are rendered with Python's shortest round-trip representation (never
more than 17 significant digits), JSON objects sort their keys, and files are
written to a temporary name then renamed, so reruns with identical inputs
produce byte-identical artifacts and readers never observe partial writes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

from .equilibrium import (
    Equilibrium,
    EquilibriumScan,
    ScanConfig,
    TatonnementResult,
    UniquenessReport,
)
from .scenarios import HalvingReport, SweepResult
from .varlab import ImpulseResponse, VarDataset, VarModel


def fmt(value: float) -> str:
    """Shortest round-trip decimal form of a finite float."""
    x = float(value)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value in artifact: {x!r}")
    if x == 0.0:
        x = 0.0  # collapse -0.0
    return repr(x)


def json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a same-directory temporary and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _csv_writer():
    buffer = io.StringIO()
    return buffer, csv.writer(buffer, lineterminator="\n")


# --- equilibria ---------------------------------------------------------------

_EQUILIBRIUM_COLUMNS = ("P_star", "H_star", "sigma_star", "residual",
                        "slope_direct", "slope_indirect", "slope_total",
                        "stability")


def _equilibrium_row(eq: Equilibrium) -> list[str]:
    return [fmt(eq.P_star), fmt(eq.H_star), fmt(eq.sigma_star),
            fmt(eq.excess_residual), fmt(eq.slope.direct),
            fmt(eq.slope.indirect), fmt(eq.slope.total), eq.stability]


def equilibria_csv(equilibria: tuple[Equilibrium, ...]) -> str:
    buffer, writer = _csv_writer()
    writer.writerow(_EQUILIBRIUM_COLUMNS)
    for eq in equilibria:
        writer.writerow(_equilibrium_row(eq))
    return buffer.getvalue()


def equilibrium_doc(eq: Equilibrium) -> dict:
    return {
        "P_star": float(eq.P_star),
        "H_star": float(eq.H_star),
        "sigma_star": float(eq.sigma_star),
        "residual": float(eq.excess_residual),
        "slope_direct": float(eq.slope.direct),
        "slope_indirect": float(eq.slope.indirect),
        "slope_total": float(eq.slope.total),
        "stability": eq.stability,
    }


def equilibria_json(scan: EquilibriumScan) -> str:
    doc = {
        "equilibria": [equilibrium_doc(eq) for eq in scan.equilibria],
        "z_p_min": float(scan.z_p_min),
        "z_p_max": float(scan.z_p_max),
        "boundary_ok": scan.boundary_ok,
        "warnings": list(scan.warnings),
    }
    return json_text(doc)


# --- scenarios ----------------------------------------------------------------

def halving_report_json(report: HalvingReport) -> str:
    doc = {
        "pre": equilibrium_doc(report.pre),
        "post": equilibrium_doc(report.post),
        "delta_P": float(report.delta_P),
        "delta_H": float(report.delta_H),
        "delta_sigma": float(report.delta_sigma),
        "selection_note": report.selection_note,
    }
    return json_text(doc)


def sweep_csv(result: SweepResult) -> str:
    max_count = max((len(r.equilibria) for r in result.rows), default=0)
    header = ["axis_value", "n_equilibria"]
    for i in range(1, max_count + 1):
        header += [f"P_star_{i}", f"H_star_{i}", f"stability_{i}"]
    buffer, writer = _csv_writer()
    writer.writerow(header)
    for row in result.rows:
        cells = [fmt(row.axis_value)]
        if row.valid:
            cells.append(str(len(row.equilibria)))
            for eq in row.equilibria:
                cells += [fmt(eq.P_star), fmt(eq.H_star), eq.stability]
        else:
            cells.append("")
        cells += [""] * (len(header) - len(cells))
        writer.writerow(cells)
    return buffer.getvalue()


def sweep_json(result: SweepResult) -> str:
    doc = {
        "axis_field": result.axis_field,
        "grid": [float(v) for v in result.grid],
        "rows": [
            {
                "axis_value": float(row.axis_value),
                "valid": row.valid,
                "error": row.error,
                "equilibria": [equilibrium_doc(eq) for eq in row.equilibria],
            }
            for row in result.rows
        ],
        "bifurcation_points": [[float(a), float(b)]
                               for a, b in result.bifurcation_points],
    }
    return json_text(doc)


# --- equilibrium dynamics and checks -------------------------------------------

def tatonnement_csv(result: TatonnementResult) -> str:
    buffer, writer = _csv_writer()
    writer.writerow(("iteration", "P", "Z"))
    for iteration, price, excess in result.trajectory:
        writer.writerow((str(iteration), fmt(price), fmt(excess)))
    return buffer.getvalue()


def uniqueness_json(report: UniquenessReport, scan: ScanConfig) -> str:
    doc = {
        "holds_everywhere": report.holds_everywhere,
        "margin": float(report.margin),
        "violation_intervals": [[float(a), float(b)]
                                for a, b in report.violation_intervals],
        "window": {
            "p_min": float(scan.p_min),
            "p_max": float(scan.p_max),
            "n_grid": int(scan.n_grid),
            "log_spaced": bool(scan.log_spaced),
        },
    }
    return json_text(doc)


# --- var-lab -------------------------------------------------------------------

def dataset_csv(data: VarDataset) -> str:
    buffer, writer = _csv_writer()
    writer.writerow(("week", "log_P", "log_H", "log_Phi", "halving_dummy"))
    for week in range(len(data)):
        writer.writerow((
            str(week),
            fmt(data.log_P[week]),
            fmt(data.log_H[week]),
            fmt(data.log_Phi[week]),
            str(int(data.exog_halving[week])),
        ))
    return buffer.getvalue()


def var_model_json(model: VarModel) -> str:
    doc = {
        "lag_order": int(model.lag_order),
        "var_names": list(model.var_names),
        "intercepts": [float(v) for v in model.intercepts],
        "halving_loading": [float(v) for v in model.halving_loading],
        "lag_matrices": {
            f"A{i + 1}": [[float(v) for v in row] for row in A]
            for i, A in enumerate(model.coef_lags)
        },
        "residual_covariance": [[float(v) for v in row] for row in model.resid_cov],
        "spectral_radius": float(model.spectral_radius),
        "n_obs": int(model.n_obs),
        "coefficient_table": {
            "labels": list(model.coef_labels),
            "estimates": [[float(v) for v in row] for row in model.coefficients],
            "stderr": [[float(v) for v in row] for row in model.coef_stderr],
        },
    }
    return json_text(doc)


def irf_csv(irf: ImpulseResponse) -> str:
    buffer, writer = _csv_writer()
    writer.writerow(("horizon", "resp_log_P", "resp_log_H", "resp_log_Phi"))
    for t in range(len(irf.horizons)):
        writer.writerow((
            str(int(irf.horizons[t])),
            fmt(irf.responses[t, 0]),
            fmt(irf.responses[t, 1]),
            fmt(irf.responses[t, 2]),
        ))
    return buffer.getvalue()
