"""Error types raised by dacperc. Each carries the process exit code used by the CLI."""


class DacpercError(Exception):
    exit_code = 1


class ConfigError(DacpercError):
    """Invalid run configuration; message lists the offending fields."""
    exit_code = 2


class OracleCapExceeded(DacpercError):
    exit_code = 3


class PackingCapExceeded(OracleCapExceeded):
    pass


class SubcriticalityViolation(DacpercError):
    """Too many FK clusters span the buffer between measurement window and box boundary."""
    exit_code = 4


class LatticeError(DacpercError):
    pass


class ZeroProbabilityCondition(DacpercError):
    pass


class ClusterEscapesBox(DacpercError):
    pass


class MalformedCrossing(DacpercError):
    pass


class NotDecreasingEvent(DacpercError):
    pass
