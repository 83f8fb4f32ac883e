"""Exception hierarchy shared by every module of the package."""


class KrylovGapError(Exception):
    """Base class for all errors raised by krylovgap."""


class InvalidInput(KrylovGapError, ValueError):
    """A matrix contains NaN/Inf or cannot be read as a 2-D real array."""


class InvalidArgument(KrylovGapError, ValueError):
    """An argument is out of range or shapes do not conform."""


class NoGapAtIndex(KrylovGapError):
    """The singular values at the requested index are (numerically) equal."""

    def __init__(self, index, sigma_l=None, sigma_next=None):
        self.index = index
        self.sigma_l = sigma_l
        self.sigma_next = sigma_next
        super().__init__(
            f"no singular gap at index {index}: "
            f"sigma_l={sigma_l!r}, sigma_(l+1)={sigma_next!r}"
        )


class NotCompatible(KrylovGapError):
    """The starting guess fails a rank / compatibility hypothesis."""


class EmptyKrylov(KrylovGapError):
    """Every generator of a block Krylov space vanishes (A X = 0)."""


class InsufficientKrylovRank(KrylovGapError):
    """dim R(K_ell) is smaller than the requested rank parameter."""

    def __init__(self, d, h):
        self.d = d
        self.h = h
        super().__init__(f"Krylov space has dimension {d} < rank parameter {h}")
