"""Exception hierarchy shared by all collabsec modules."""


class CollabsecError(Exception):
    """Base class for every error raised on purpose by this package."""

    code = "error"


class EmptyNetworkError(CollabsecError):
    code = "empty_network"


class DisconnectedGraphError(CollabsecError):
    code = "disconnected"


class RecordParseError(CollabsecError):
    code = "record_parse"

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BreachLookupError(CollabsecError):
    code = "breach_lookup"


class EnrichmentError(CollabsecError):
    code = "enrichment"


class NoSeedError(CollabsecError):
    code = "no_seed"


class InfeasibleParametersError(CollabsecError, ValueError):
    code = "infeasible"
