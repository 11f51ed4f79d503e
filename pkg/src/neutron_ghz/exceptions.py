class NeutronGhzError(Exception):
    """Base exception for neutron GHZ simulation errors"""


class InvalidStateError(NeutronGhzError):
    """Raised when a state or operator violates its construction invariants"""


class InvalidParameterError(NeutronGhzError, ValueError):
    """Raised when a physical parameter lies outside its domain"""


class FitError(NeutronGhzError):
    """Raised when a sinusoid fit has a degenerate design matrix"""


class ExtractionError(NeutronGhzError):
    """Raised when expectation values cannot be extracted from fitted scans"""


class ConfigError(NeutronGhzError):
    """Raised when a run configuration cannot be loaded or validated"""

    def __init__(self, msg: str, line: int | None = None) -> None:
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line
