"""Error hierarchy mirroring the CLI exit-code contract."""


class EvalError(Exception):
    """Base class for all harness errors."""


class PlanError(EvalError):
    """Invalid plan/configuration input (exit code 2)."""


class EvalDataError(EvalError):
    """Invalid or inconsistent data input (exit code 3)."""
