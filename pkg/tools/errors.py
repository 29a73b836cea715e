"""
Exception types shared by the simulator tools
"""
from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class DomainError(SimulationError, ValueError):
    """An input lies outside the domain of the operation"""


class ShapeError(SimulationError, ValueError):
    """Array dimensions do not agree"""


class DegenerateChannelError(SimulationError):
    """A channel (or combined channel) is identically zero"""


class ConfigError(SimulationError):
    """
    Invalid configuration entry
    Carries the offending key and the line it came from
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[str] = None):
        self.key = key
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"'{key}'")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class CollocatedUserError(DomainError):
    """A user position coincides with the BS or the IRS"""
