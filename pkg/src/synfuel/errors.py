"""Exception hierarchy shared across the package."""


class SynfuelError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SynfuelError):
    """Scenario configuration is invalid (schema, missing files, bad values)."""


class FitError(SynfuelError):
    """A model fit failed (rank deficiency, non-convergence, non-stationarity).

    `diagnostics` carries solver details when available.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InfeasibleDispatch(SynfuelError):
    """The dispatch problem has no feasible schedule.

    `first_failing_hour` is the first hour index (0-based) at which the
    storage balance cannot be maintained.
    """

    def __init__(self, message, first_failing_hour=None):
        super().__init__(message)
        self.first_failing_hour = first_failing_hour


class InfeasibleSite(SynfuelError):
    """The site cannot host the minimum plant size."""


class FeedstockShortfall(SynfuelError):
    """CO2 demand exceeds the supply curve extent; `deficit_tpy` quantifies it."""

    def __init__(self, message, deficit_tpy=None):
        super().__init__(message)
        self.deficit_tpy = deficit_tpy
