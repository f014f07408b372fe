"""Exception types shared across the package."""


class UpsilonLabError(Exception):
    """Base class for all package errors."""


class DomainError(UpsilonLabError, ValueError):
    """An argument is outside the domain of the operation."""


class InvalidPointError(UpsilonLabError, ValueError):
    """A point does not lie on the model surface of its space."""


class NonUniqueGeodesicError(UpsilonLabError, ValueError):
    """The connecting geodesic is not unique (antipodal points on the sphere)."""


class InfiniteDistanceError(UpsilonLabError, ValueError):
    """An operation requiring finite transport distance received configurations
    of different cardinality."""


class SpaceMismatchError(UpsilonLabError, ValueError):
    """Two objects that must share a base space do not."""
