"""Exception types shared across the simulator and the geometry suite."""
from __future__ import annotations


class CliqueGeoError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(CliqueGeoError):
    """Bad input or configuration supplied by the caller (usage error)."""


class SimulationViolation(CliqueGeoError):
    """The simulated protocol broke a model rule; signals an algorithm bug."""


class CongestionViolation(SimulationViolation):
    """Two messages queued for the same ordered node pair in one round."""


class BudgetViolation(SimulationViolation):
    """A message exceeded the configured per-message bit budget."""


class NonTermination(SimulationViolation):
    """The protocol ran past the configured round ceiling."""


class ProtocolError(SimulationViolation):
    """Node programs diverged (for example, mismatched collective requests)."""


class InfeasibleRouting(SimulationViolation):
    """A routing instance exceeded the per-node source or sink capacity."""


class DuplicatePoint(PreconditionError):
    """The global point set contains a repeated point."""


class VerticalLine(PreconditionError):
    """Two points with equal x cannot define a supporting line slope."""


class CollinearTriple(PreconditionError):
    """Three collinear points where general position is required."""


class NotPowerOfTwo(PreconditionError):
    """The triangulation pipeline requires the node count to be a power of two."""


class NoMateFound(SimulationViolation):
    """No valid opposite-chain partner for a corridor split; geometry bug."""


class GenerationExhausted(PreconditionError):
    """A point-set generator could not satisfy its constraints at this width."""
