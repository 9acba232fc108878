"""Exception types shared across the pipeline."""


class MorphAugError(Exception):
    """Base class for all pipeline errors."""


class StructuralError(MorphAugError):
    """Input files or data structures violate a structural contract."""


class EncodingError(StructuralError):
    """Input bytes could not be decoded as UTF-8."""


class ConfigurationError(MorphAugError):
    """A configuration value or input makes the requested run impossible."""


class CapacityError(MorphAugError):
    """The generator ran out of unique synthetic pairs before a tier filled."""

    def __init__(self, requested: int, achieved: int):
        self.requested = requested
        self.achieved = achieved
        super().__init__(
            f"requested tier size {requested} but only {achieved} unique "
            f"synthetic pairs could be generated"
        )
