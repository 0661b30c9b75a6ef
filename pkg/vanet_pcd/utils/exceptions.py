"""
Exception types raised by the simulator
"""


class PcdError(Exception):
    """Base class for simulator errors"""


class ConfigError(PcdError, ValueError):
    """Invalid scenario configuration (unknown key, bad value, violated bound)"""


class FleetConstructionError(PcdError, ValueError):
    """The requested fleet cannot be placed on the highway"""


class ChannelDomainError(PcdError, ValueError):
    """Channel quantity requested outside its domain"""


class CoalitionContractError(PcdError, ValueError):
    """A preference was queried for a coalition that does not contain the player"""


class NonConvergenceError(PcdError, RuntimeError):
    """Coalition formation did not settle within the round cap"""
