"""Exception types shared across the package."""


class CfdiagError(Exception):
    """Base class for all errors raised by this package."""


class EvidenceError(CfdiagError):
    """Evidence refers to unknown nodes, wrong layers, or contradicts itself."""


class CapExceededError(CfdiagError):
    """An enumeration cap (subset, risk, latent, or observed-node budget) was hit.

    Raised eagerly, before any exponential work starts.
    """


class RejectionLimitError(CfdiagError):
    """Rejection sampling failed to produce an accepted draw within its budget."""


class ZeroLikelihoodError(CfdiagError):
    """The conditioning evidence has probability zero under the model."""


class NumericsError(CfdiagError):
    """A computed quantity left its feasible range by more than tolerance.

    Signals accumulated floating-point error (or a genuine bug) rather than a
    property of the model, so it is never silently clamped away.
    """
