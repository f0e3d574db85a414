"""Exception hierarchy shared by every arraybeam module."""


class ArraybeamError(Exception):
    """Base class for all errors raised by arraybeam."""


class ParameterError(ArraybeamError, ValueError):
    """A generator, grid or scenario parameter violates its invariant."""


class GeometryError(ArraybeamError, ValueError):
    """Positions are degenerate (coincident mics, source sitting on a mic)."""


class ContractError(ArraybeamError, ValueError):
    """An operation was called with inputs outside its contract."""


class FitError(ArraybeamError, RuntimeError):
    """A least-squares fit could not be performed on the supplied samples."""
