"""Shared exception and warning types."""


class PsiDomainError(ValueError):
    """Weight function evaluated outside its domain (t < 1 or past a table)."""


class SingularPoint(ValueError):
    """Kernel requested at a point where its defining series diverges."""


class ToleranceUnreachable(RuntimeError):
    """Requested accuracy would need more series terms than the configured cap."""


class MeanNotZero(ValueError):
    """Integration source term must be orthogonal to constants."""


class ZeroPolynomial(ValueError):
    """Operation undefined for the identically-zero polynomial."""


class InconclusiveAtHorizon(RuntimeError):
    """A finite-horizon decay test neither certified nor refuted the condition."""


class TailNotControlled(RuntimeError):
    """Series remainder bound could not be pushed below tolerance at the term cap."""


class MaxIterationsError(RuntimeError):
    """Iterative solver hit its iteration cap without meeting its stopping rule.

    The best iterate found so far is attached as ``.best`` when available.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateActiveSet(RuntimeError):
    """Minimax exchange/LP could not produce a usable active set."""


class AliasingRisk(UserWarning):
    """Sampling grid too coarse for the requested harmonic content."""
