"""Exception types shared across the package."""


class GWBurnError(Exception):
    """Base class."""


class InvalidParameter(GWBurnError, ValueError):
    pass


class InvalidSequence(GWBurnError, ValueError):
    pass


class BadSum(GWBurnError, ValueError):
    pass


class CapExceeded(GWBurnError, ValueError):
    pass


class IncompatibleSize(GWBurnError, ValueError):
    """n is not 1 mod the span, so the conditioned tree does not exist."""


class RejectionLimitExceeded(GWBurnError, RuntimeError):
    pass


class SourceAlreadyBurning(GWBurnError, ValueError):
    def __init__(self, index: int, vertex: int):
        super().__init__(f"source #{index} (vertex {vertex}) is already burning")
        self.index = index
        self.vertex = vertex
