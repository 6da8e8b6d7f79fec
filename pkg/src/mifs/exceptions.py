class DataError(ValueError):
    """Input data is malformed or unusable (bad CSV, non-finite, constant column)."""


class EstimatorError(ValueError):
    """A nearest-neighbor estimate is undefined for the given sample."""
