"""Shared exception types.

The command-line front end maps ConfigError to exit code 2 and
SimulationError (and its subclasses) to exit code 3.
"""


class ConfigError(Exception):
    """Invalid configuration value, config file, or shape parameter."""


class SimulationError(Exception):
    """A simulation contract was violated at run time."""


class OutsideFootprintError(SimulationError):
    """A query or gripper pin fell outside the terrain footprint."""


class PhaseError(SimulationError):
    """A gripper phase transition was requested out of order."""
