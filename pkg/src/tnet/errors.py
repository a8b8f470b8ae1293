"""Exception types shared across the package."""

from __future__ import annotations


class TnetError(Exception):
    """Base class for all package errors."""


class StochasticityError(TnetError):
    """A probability table failed validation (negative mass, bad row sum)."""


class CompositionError(TnetError):
    """Two transducers cannot be composed (alphabet mismatch)."""


class TopologyError(TnetError):
    """An operation referenced a node or edge that does not exist."""


class FixationError(TnetError):
    """An attempt was made to mutate structure frozen by fixation."""


class ZeroDenominatorError(TnetError):
    """A relative-activation ratio is undefined (all terms zero)."""


class ConfigError(TnetError):
    """An experiment configuration is missing or malformed."""
