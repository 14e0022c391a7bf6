"""Domain exceptions and their CLI exit codes"""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class LabError(Exception):
    """Base error carrying a stable process exit code"""

    exit_code: int = EXIT_RUNTIME

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(LabError):
    """Malformed config file or unknown option value"""

    exit_code = EXIT_USAGE

    def __init__(self, detail: str, line: int | None = None, field: str | None = None):
        super().__init__(detail)
        self.line = line
        self.field = field


class MissingInputError(LabError):
    exit_code = EXIT_USAGE


class UnsupportedGameError(LabError):
    """Operation only defined for another game (e.g. solving Pentago)"""

    exit_code = EXIT_USAGE


class InsufficientDataError(LabError):
    """Not enough usable inputs to produce a result"""


class TrainingDivergedError(LabError):
    """Non-finite loss or gradient during optimization"""


class LabRuntimeError(LabError):
    pass


class IllegalMoveError(ValueError):
    """A move that violates the game rules; the message names the rule"""
