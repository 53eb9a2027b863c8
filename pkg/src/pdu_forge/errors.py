"""Exception hierarchy shared by all pdu_forge modules."""


class PduForgeError(Exception):
    """Base class for every error raised by this package."""


class OccupancyOverflow(PduForgeError):
    """A mode occupation would exceed the configured ``n_max``."""


class RegistryMismatch(PduForgeError):
    """Two states are defined over different mode registries."""


class NormViolation(PduForgeError):
    """An element failed the unitarity guard."""


class PumpOccupancyUnsupported(PduForgeError):
    """A PDU input mode carries two or more photons."""


class PduOutputOccupied(PduForgeError):
    """A PDU fired into an output or residual mode that already holds photons."""


class InvalidNetlist(PduForgeError):
    """Netlist failed validation; ``diagnostics`` lists the offending components."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class NetlistSyntaxError(PduForgeError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DimensionMismatch(PduForgeError):
    """Fidelity requested between objects of different shape."""


class ConfigError(PduForgeError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


class DegenerateIndices(PduForgeError):
    """Signal and idler effective indices coincide; the SLM bound is unattainable."""


class OutOfValidityRange(PduForgeError):
    """Wavelength outside the validity range of a Sellmeier coefficient set."""
