"""powlab: equilibrium laboratory for proof-of-work asset pricing.

The library solves a fixed-point model in which the asset price clears the
market for a fixed coin supply while the same price sustains a free-entry
equilibrium in hash-rate production, whose level feeds back into perceived
network security and hence demand. On top of the static solver sit halving
comparative statics, multiplicity sweeps, and a synthetic-data VAR pipeline.
"""

from .demand import DemandPoint, speculator_demand, total_demand, user_demand
from .equilibrium import (
    DEFAULT_WINDOW,
    MARGINAL,
    STABLE,
    UNSTABLE,
    Equilibrium,
    EquilibriumScan,
    ScanConfig,
    SlopeDecomposition,
    TatonnementResult,
    UniquenessReport,
    aggregate_demand_slope,
    check_uniqueness_condition,
    excess_demand,
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
from .hashsupply import (
    HashSupplyPoint,
    cdf,
    density,
    hash_supply_derivative,
    inv_cdf,
    revenue_per_hash,
    solve_hash_supply,
)
from .normal import std_normal_cdf, std_normal_pdf
from .params import (
    DemandParams,
    EconomyParams,
    MinerCostModel,
    PiecewiseLinearCosts,
    PowerCosts,
    ProtocolParams,
    SecurityParams,
    UniformCosts,
    ValidatedEconomyParams,
    economy_from_dict,
    economy_from_json,
    economy_to_dict,
    economy_to_json,
    validate,
)
from .scenarios import (
    HalvingReport,
    SweepResult,
    SweepRow,
    apply_halving,
    halving_report,
    parameter_sweep,
    replace_field,
)
from .security import SafetyPoint, attack_probability, safety
from .varlab import (
    Ar1Spec,
    DynamicsSpec,
    GrangerReport,
    ImpulseResponse,
    VarDataset,
    VarModel,
    estimate_var,
    granger_lead_lag,
    impulse_response,
    load_dataset,
    simulate_economy,
)

__version__ = "0.1.0"
