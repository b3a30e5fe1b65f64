"""Exception taxonomy.

Two families matter to callers: bad inputs (DomainError, CLI exit code 2)
and exhausted budgets (BudgetError, CLI exit code 3). Finer-grained kinds
subclass one of the two so library code can raise something descriptive
without widening the surface the CLI and service have to map.
"""


class SBMBoundsError(Exception):
    """Base class for everything raised on purpose by this package."""


class DomainError(SBMBoundsError):
    """Parameters outside the operation's domain or violated preconditions."""


class NoCrossingError(DomainError):
    """A bracketing search found no sign change (e.g. lambda_star for k <= 4)."""


class BudgetError(SBMBoundsError):
    """An enumeration, sampling, or iteration budget was exhausted."""


class SamplingError(BudgetError):
    """Rejection sampling failed to produce a simple graph within budget."""


class ProjectionError(BudgetError):
    """Sinkhorn projection failed to converge within its iteration cap."""
