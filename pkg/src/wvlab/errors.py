"""Exception types shared across the package.

``RegimeError`` subclasses signal a physics-regime problem (the requested
quantity is undefined or numerically meaningless for the given
parameters); the CLI maps them to exit code 1.  Configuration/parse
problems use ``ConfigError`` (exit code 2).
"""


class RegimeError(Exception):
    """A computation was requested outside its regime of validity."""


class NearOrthogonalSelection(RegimeError):
    """Pre- and post-selection overlap below the denominator floor."""


class NonOrthogonalPackets(RegimeError):
    """Packet-isolating projectors requested while the packets overlap."""


class SupportOverflow(RegimeError):
    """Wavefunction support leaks past the grid guard band (or Nyquist)."""


class PostSelectionImpossible(RegimeError):
    """Post-selection amplitude vanishes; conditional state undefined."""


class TopologyMismatch(RegimeError):
    """Scenario does not have the element structure an operation needs."""


class NoCrossing(RegimeError):
    """A packet co-moving with an element can never cross its worldline."""


class UnboundedBranch(RegimeError):
    """A traced branch keeps interacting and never leaves the apparatus."""


class ConfigError(Exception):
    """Malformed run configuration or scenario file."""
