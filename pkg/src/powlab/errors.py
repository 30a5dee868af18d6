"""Exception hierarchy shared across the package.

Every failure mode raised by library code derives from :class:`PowlabError`
so that callers (notably the CLI) can map errors onto exit codes without
string matching.
"""

from __future__ import annotations


class PowlabError(Exception):
    """Base class for all errors raised by powlab."""


class ParameterError(PowlabError, ValueError):
    """One or more parameter invariants failed validation.

    Carries the full list of violations so a single validation pass reports
    every problem at once.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(PowlabError, ValueError):
    """An argument lies outside an operation's mathematical domain."""


class SolverError(PowlabError, RuntimeError):
    """A root-finder failed to converge; message reports bracket and residual."""


class ScenarioError(PowlabError, RuntimeError):
    """A comparative-statics scenario could not be completed."""


class SimulationError(PowlabError, RuntimeError):
    """The weekly simulation failed; message reports week and state."""


class EstimationError(PowlabError, RuntimeError):
    """Least-squares estimation failed (rank deficiency, bad dimensions)."""


class DatasetError(PowlabError, ValueError):
    """An external time-series file failed parsing or validation."""
