"""Exception hierarchy shared by the protocol modules and the simulator."""


class BPCError(Exception):
    """Base class for every error raised by this package."""


class BeaconError(BPCError, ValueError):
    pass


class InvalidFieldError(BeaconError):
    """A beacon field violates its range or an invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"invalid field {field!r}: {message}")
        self.field = field


class TruncatedBeaconError(BeaconError):
    pass


class CorruptBeaconError(BeaconError):
    """Wire bytes decoded to a beacon that violates its invariants."""

    def __init__(self, field: str, message: str):
        super().__init__(f"corrupt beacon, field {field!r}: {message}")
        self.field = field


class NoNeighborsError(BPCError):
    """No neighbor delivered a beacon during the window being assessed."""


class WindowOverflowError(BPCError, ValueError):
    pass


class DegenerateDistanceError(BPCError, ValueError):
    pass


class InconsistentAssessmentError(BPCError, ValueError):
    pass


class InvalidPowerError(BPCError, ValueError):
    pass


class ScenarioError(BPCError, ValueError):
    """Scenario validation failed; ``errors`` holds every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
