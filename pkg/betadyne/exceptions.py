"""Error hierarchy for the betadyne library"""


class BetadyneError(Exception):
    """Base class for all library errors"""


# Not ValueError subclasses: raised inside pydantic validators they must
# propagate unwrapped.
class DimensionError(BetadyneError):
    """Operator, state or index dimensions do not fit together"""


class HermiticityError(BetadyneError):
    """A Hamiltonian or state expected to be Hermitian is not"""


class UnitarityError(BetadyneError):
    """A channel-mixing matrix is not unitary"""


class GridError(BetadyneError, ValueError):
    """Invalid time grid"""


class StepSizeError(BetadyneError):
    """Time step too coarse for first-order jump sampling"""


class SpectralError(BetadyneError):
    """Eigensolver failure or non-finite spectral data"""


class EmptySampleError(BetadyneError):
    """No trajectory survived postselection at the requested time"""


class ConfigError(BetadyneError, ValueError):
    """Bad CLI or run configuration"""


class StateError(BetadyneError, ValueError):
    """A ket is not normalized or a density matrix is not unit-trace and positive"""


class NonFiniteError(BetadyneError, ValueError):
    """NaN or infinite entries reached a numerical kernel"""
