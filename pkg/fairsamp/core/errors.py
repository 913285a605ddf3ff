"""Exception hierarchy for the workbench."""


class WorkbenchError(Exception):
    """Base class for every error raised by fairsamp."""
    pass


class ModelError(WorkbenchError):
    """Invalid Ising model or ground-state request."""
    pass


class SizeLimitError(WorkbenchError):
    """Qubit count exceeds what an exhaustive or dense method supports."""
    pass


class CircuitError(WorkbenchError):
    """Malformed circuit or unsupported operation on a circuit."""
    pass


class CompilationError(WorkbenchError):
    pass


class AncillaBudgetError(CompilationError):
    pass


class UnroutableGateError(CompilationError):
    pass


class CalibrationError(WorkbenchError):
    pass


class MissingCalibrationError(CalibrationError):
    pass


class FairnessError(WorkbenchError):
    pass


class ConfigurationError(WorkbenchError):
    pass


class ExperimentError(WorkbenchError):
    pass
