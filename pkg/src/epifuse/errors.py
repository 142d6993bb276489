"""Exception taxonomy shared by all epifuse modules."""


class EpifuseError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(EpifuseError):
    """Array shapes are inconsistent with an operation's contract."""


class DataFormatError(EpifuseError):
    """An input file is malformed (bad header, bad cell, bad grid shape...)."""


class AlignmentError(EpifuseError):
    """Two date-indexed streams do not cover the same days."""


class ConfigError(EpifuseError):
    """A configuration value is out of its legal range."""


class DivergenceError(EpifuseError):
    """Training produced non-finite values (loss or gradients)."""


class FilterDivergenceError(EpifuseError):
    """The ensemble filter hit a singular innovation covariance."""
