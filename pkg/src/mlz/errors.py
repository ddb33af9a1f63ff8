"""Exception hierarchy for the mlz package.

Every failure mode raised by the library derives from :class:`MlzError`,
so callers (notably the CLI) can catch one type and map it to a nonzero
exit code.
"""


class MlzError(Exception):
    """Base class for all mlz errors."""


class ModelFormatError(MlzError):
    """A model file or dict does not conform to the JSON schema."""


class HermiticityViolation(MlzError):
    """The coupling matrix is not Hermitian with a zero diagonal."""


class DegenerateSlopeCoupling(MlzError):
    """Two levels with equal slopes carry a nonzero mutual coupling.

    In the diabatic basis such couplings can always be removed, so they
    are rejected rather than silently accepted.
    """


class DuplicateLevel(MlzError):
    """Two levels share both slope and offset (the same diabatic line)."""


class EigensolverNoConvergence(MlzError):
    """The Jacobi eigensolver did not converge within the sweep cap."""


class NonpositiveSlopeGap(MlzError):
    """A Landau-Zener probability was requested for a zero slope gap."""


class StepUnderflow(MlzError):
    """The adaptive integrator needed a step below its floor.

    Signals tolerance misconfiguration (the floor is 1e-12 of the
    integration window).
    """


class NormDrift(MlzError):
    """State norm drifted from its initial value by more than 1e-5."""


class UnitarityViolation(MlzError):
    """The assembled scattering matrix fails the unitarity check."""


class NotConverged(MlzError):
    """Window enlargement did not bring the truncation estimate below 1e-2."""


class SimultaneousSharedCrossing(MlzError):
    """Two coupled crossings involving the same level occur at equal times.

    The independent-crossing factorization is undefined in that case, so
    the semiclassical engine refuses to proceed.
    """


class PathExplosion(MlzError):
    """Path enumeration exceeded the configured path-count cap."""
