"""Exception and warning types raised across the package."""


class DoubleDarkError(Exception):
    """Base class for all errors raised by :mod:`doubledark`."""


class ParameterError(DoubleDarkError, ValueError):
    """Invalid model parameters.

    ``violations`` lists every problem found, not only the first.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else [message]


class NegativeRate(ParameterError):
    pass


class FluxImbalance(ParameterError):
    pass


class NonPositiveProbe(ParameterError):
    pass


class DegenerateSpectrum(DoubleDarkError):
    pass


class ValidityViolated(DoubleDarkError):
    """A perturbative formula was requested outside its stated assumptions."""


class UnsupportedDetuning(DoubleDarkError):
    pass


class OutsideRegime(DoubleDarkError):
    pass


class NonUniqueSteadyState(DoubleDarkError):
    pass


class SingularSystem(DoubleDarkError):
    pass


class NoSignChange(DoubleDarkError):
    pass


class NonlinearityWarning(UserWarning):
    """Probe response changed under probe halving: the probe is not weak."""


class RegimeWarning(UserWarning):
    pass


class DegenerateDynamicsWarning(UserWarning):
    pass
