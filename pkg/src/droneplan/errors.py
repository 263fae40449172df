"""Exception types shared across the planner."""


class DegenerateLinkError(ValueError):
    """Link with zero slant distance (user and drone coincide)."""


class NoServerError(ValueError):
    """No active drone available to serve a user."""


class InfeasibleRateError(ValueError):
    """Target rate exceeds the per-drone capacity; no fleet size works."""


class ScenarioError(ValueError):
    """Scenario file failed to parse or violated an invariant."""


class ConfigError(ValueError):
    """Bad CLI/config input; message carries the offending field path."""
