"""Exception hierarchy shared by every hydroq module."""


class HydroQError(Exception):
    """Base class for all hydroq errors."""


class InvalidQubit(HydroQError, IndexError):
    pass


class ParamArityMismatch(HydroQError, ValueError):
    pass


class FeatureScaleError(HydroQError, ValueError):
    pass


class DimMismatch(HydroQError, ValueError):
    pass


class KernelError(HydroQError, ValueError):
    pass


class EmptyBatch(HydroQError, ValueError):
    pass


class EmptyInput(HydroQError, ValueError):
    pass


class EmptyTrainSet(HydroQError, ValueError):
    pass


class DivergenceError(HydroQError, FloatingPointError):
    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class InsufficientHistory(HydroQError, ValueError):
    pass


class DegenerateLabels(HydroQError, ValueError):
    pass


class SingularDesign(HydroQError, ValueError):
    pass


class TooLarge(HydroQError, ValueError):
    pass


class ScheduleError(HydroQError, ValueError):
    pass


class ConfigError(HydroQError, ValueError):
    pass


class FormatError(HydroQError, ValueError):
    pass


class IoError(HydroQError, OSError):
    pass
