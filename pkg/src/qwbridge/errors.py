"""Exception types shared across the package."""


class BridgeConfigError(ValueError):
    """Invalid physical configuration or malformed config file."""


class NoBalanceError(ValueError):
    """The requested coupling pattern admits no decoupled (dark) mode."""


class NotBalancedError(ValueError):
    """Operation requires a balanced bridge but the configuration is not."""


class OutOfRegimeError(ValueError):
    """Inputs fall outside the validity regime of an analytic formula."""


class InconclusiveSweepError(RuntimeError):
    """A tuning sweep peaked at the grid boundary; the estimate is unreliable."""
