"""
Exceptions raised by the computational core.

Input validation problems (bad files, out-of-range ids, invalid probabilities)
are reported with django's ValidationError, the same way model validators do.
The classes below cover failures of the numerical pipeline itself.
"""


class MoreError(Exception):
    """Base class for errors raised by the graph, census, model and training code."""


class ShapeError(MoreError, ValueError):
    """Matrix or vector dimensions do not fit the requested operation."""


class StateError(MoreError):
    """Two objects that must describe the same graph or run disagree."""


class CensusGuardError(MoreError):
    """Brute-force enumeration refused because the graph is too large."""


class TrainingError(MoreError):
    """Training diverged; `epoch` is the 1-based epoch where it happened."""

    def __init__(self, message, epoch):
        super().__init__(f"{message} (epoch {epoch})")
        self.epoch = epoch
