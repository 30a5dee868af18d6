"""Command-line interface.

One JSON config document describes the economy, the scan window, and the
command-specific blocks; flags only pick the subcommand, the config path,
the output directory, and an optional seed override. Each subcommand writes
its artifact under a fixed name and prints a one-line summary. Failures emit
a single-line JSON error object on stderr with exit codes 2 (config
parsing/validation), 3 (solver/scenario errors), and 4 (I/O errors).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import artifacts
from .equilibrium import (
    ScanConfig,
    check_uniqueness_condition,
    find_equilibria,
    tatonnement,
)
from .errors import (
    DatasetError,
    DomainError,
    EstimationError,
    ParameterError,
    PowlabError,
    ScenarioError,
    SimulationError,
    SolverError,
)
from .params import ValidatedEconomyParams, economy_from_dict, validate
from .scenarios import halving_report, parameter_sweep
from .varlab import (
    Ar1Spec,
    DynamicsSpec,
    VarDataset,
    estimate_var,
    impulse_response,
    load_dataset,
    simulate_economy,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

_COMMANDS = ("solve", "halving", "sweep", "uniqueness-check", "tatonnement",
             "simulate", "var", "irf")
_TOP_KEYS = {"economy", "scan", "tatonnement", "sweep", "dynamics", "var"}


def _config_error(message: str) -> ParameterError:
    return ParameterError([message])


def _check_keys(doc: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise _config_error(f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise _config_error(f"missing field(s) in {where}: {sorted(missing)}")


def _load_config(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _config_error(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise _config_error(f"config {path} must be a JSON object")
    _check_keys(doc, _TOP_KEYS, {"economy"}, "config")
    return doc


def _economy(doc: dict) -> ValidatedEconomyParams:
    return validate(economy_from_dict(doc["economy"]))


def _scan(doc: dict) -> ScanConfig:
    block = doc.get("scan", {})
    if not isinstance(block, dict):
        raise _config_error("scan must be an object")
    allowed = {"p_min", "p_max", "n_grid", "log_spaced", "refine_tol"}
    _check_keys(block, allowed, set(), "scan")
    return ScanConfig(**block)


def _ar1(block: dict, where: str) -> Ar1Spec:
    if not isinstance(block, dict):
        raise _config_error(f"{where} must be an object")
    _check_keys(block, {"persistence", "sd", "mean"}, {"persistence", "sd"}, where)
    return Ar1Spec(**block)


def _dynamics(doc: dict, seed_override: int | None) -> DynamicsSpec:
    block = doc.get("dynamics")
    if block is None:
        raise _config_error("this command needs a 'dynamics' block in the config")
    if not isinstance(block, dict):
        raise _config_error("dynamics must be an object")
    allowed = {"T", "lambda_adj", "theta_u_shock", "fee_process",
               "halving_week", "seed"}
    _check_keys(block, allowed, {"T", "lambda_adj", "theta_u_shock",
                                 "fee_process"}, "dynamics")
    seed = block.get("seed", 0)
    if seed_override is not None:
        seed = seed_override
    return DynamicsSpec(
        T=block["T"],
        lambda_adj=block["lambda_adj"],
        theta_u_shock=_ar1(block["theta_u_shock"], "dynamics.theta_u_shock"),
        fee_process=_ar1(block["fee_process"], "dynamics.fee_process"),
        halving_week=block.get("halving_week"),
        seed=seed,
    )


def _var_options(doc: dict) -> dict:
    block = doc.get("var", {})
    if not isinstance(block, dict):
        raise _config_error("var must be an object")
    _check_keys(block, {"lags", "horizon", "dataset"}, set(), "var")
    return {
        "lags": block.get("lags", 2),
        "horizon": block.get("horizon", 52),
        "dataset": block.get("dataset"),
    }


def _var_dataset(doc: dict, args) -> VarDataset:
    options = _var_options(doc)
    if options["dataset"] is not None:
        return load_dataset(options["dataset"])
    return simulate_economy(_economy(doc), _dynamics(doc, args.seed), _scan(doc))


def _write(out_dir: str, name: str, text: str) -> str:
    path = os.path.join(out_dir, name)
    artifacts.atomic_write_text(path, text)
    return path


def _cmd_solve(doc: dict, args) -> None:
    outcome = find_equilibria(_economy(doc), _scan(doc))
    path = _write(args.out, "equilibria.csv",
                  artifacts.equilibria_csv(outcome.equilibria))
    note = f"; {' | '.join(outcome.warnings)}" if outcome.warnings else ""
    print(f"{path}: {len(outcome.equilibria)} equilibria "
          f"(boundary_ok={outcome.boundary_ok}){note}")


def _cmd_halving(doc: dict, args) -> None:
    report = halving_report(_economy(doc), _scan(doc))
    path = _write(args.out, "halving_report.json",
                  artifacts.halving_report_json(report))
    print(f"{path}: delta_P={artifacts.fmt(report.delta_P)} "
          f"delta_H={artifacts.fmt(report.delta_H)}")


def _cmd_sweep(doc: dict, args) -> None:
    block = doc.get("sweep")
    if block is None:
        raise _config_error("sweep command needs a 'sweep' block in the config")
    if not isinstance(block, dict):
        raise _config_error("sweep must be an object")
    _check_keys(block, {"field", "grid"}, {"field", "grid"}, "sweep")
    if not isinstance(block["grid"], list):
        raise _config_error("sweep.grid must be a list of numbers")
    result = parameter_sweep(_economy(doc), block["field"],
                             [float(v) for v in block["grid"]], _scan(doc))
    path = _write(args.out, "sweep.csv", artifacts.sweep_csv(result))
    counts = sorted({len(r.equilibria) for r in result.rows if r.valid})
    print(f"{path}: {len(result.rows)} rows, equilibria counts {counts}, "
          f"{len(result.bifurcation_points)} bifurcation interval(s)")


def _cmd_uniqueness(doc: dict, args) -> None:
    scan = _scan(doc)
    report = check_uniqueness_condition(_economy(doc), scan)
    path = _write(args.out, "uniqueness.json",
                  artifacts.uniqueness_json(report, scan))
    print(f"{path}: holds_everywhere={report.holds_everywhere} "
          f"margin={artifacts.fmt(report.margin)}")


def _cmd_tatonnement(doc: dict, args) -> None:
    block = doc.get("tatonnement")
    if block is None:
        raise _config_error(
            "tatonnement command needs a 'tatonnement' block in the config"
        )
    if not isinstance(block, dict):
        raise _config_error("tatonnement must be an object")
    _check_keys(block, {"p0", "kappa", "tol", "max_iters"}, {"p0", "kappa"},
                "tatonnement")
    scan = _scan(doc)
    result = tatonnement(
        _economy(doc),
        P0=block["p0"],
        kappa=block["kappa"],
        tol=block.get("tol", 1e-8),
        max_iters=block.get("max_iters", 10_000),
        window=(scan.p_min, scan.p_max),
    )
    path = _write(args.out, "tatonnement.csv", artifacts.tatonnement_csv(result))
    limit = artifacts.fmt(result.p_limit) if result.p_limit is not None else "-"
    print(f"{path}: outcome={result.outcome} iterations={result.iterations} "
          f"P={limit}")


def _cmd_simulate(doc: dict, args) -> None:
    data = simulate_economy(_economy(doc), _dynamics(doc, args.seed), _scan(doc))
    path = _write(args.out, "dataset.csv", artifacts.dataset_csv(data))
    print(f"{path}: {len(data)} weeks "
          f"(halvings={int(data.exog_halving.max()) if len(data) else 0})")


def _cmd_var(doc: dict, args) -> None:
    options = _var_options(doc)
    model = estimate_var(_var_dataset(doc, args), options["lags"])
    path = _write(args.out, "var_model.json", artifacts.var_model_json(model))
    print(f"{path}: lags={model.lag_order} "
          f"spectral_radius={artifacts.fmt(model.spectral_radius)}")


def _cmd_irf(doc: dict, args) -> None:
    options = _var_options(doc)
    model = estimate_var(_var_dataset(doc, args), options["lags"])
    irf = impulse_response(model, options["horizon"])
    path = _write(args.out, "irf.csv", artifacts.irf_csv(irf))
    print(f"{path}: horizons 0..{len(irf.horizons) - 1} "
          f"short_run={irf.sign_short_run} non_stationary={irf.non_stationary}")


_DISPATCH = {
    "solve": _cmd_solve,
    "halving": _cmd_halving,
    "sweep": _cmd_sweep,
    "uniqueness-check": _cmd_uniqueness,
    "tatonnement": _cmd_tatonnement,
    "simulate": _cmd_simulate,
    "var": _cmd_var,
    "irf": _cmd_irf,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powlab",
        description="Equilibrium laboratory for proof-of-work asset pricing",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="JSON config path")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the dynamics seed")
    return parser


def _fail(code: int, exc: BaseException) -> int:
    doc = {"error": {"exit_code": code, "type": type(exc).__name__,
                     "message": str(exc)}}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        _DISPATCH[args.command](doc, args)
        return EXIT_OK
    except (ParameterError, DatasetError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except (SolverError, ScenarioError, SimulationError, EstimationError,
            DomainError) as exc:
        return _fail(EXIT_SOLVER, exc)
    except PowlabError as exc:
        return _fail(EXIT_SOLVER, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)


if __name__ == "__main__":
    sys.exit(main())
