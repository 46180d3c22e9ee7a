"""Driven-dissipative 1D fermion chain toolkit.

Momentum-resolved master equation for a field-driven tight-binding chain
coupled to a fermionic reservoir, an exact finite-bath benchmark, the
associated Kraus channel, and a 3-qubit dilation-circuit verifier.
"""

__version__ = "0.1.0"


class IntegrationError(RuntimeError):
    """A numerical evolution left its validity envelope (trace drift,
    non-unitarity, nonphysical map)."""


class NotCompletelyPositiveError(RuntimeError):
    """A Choi matrix eigenvalue fell below the allowed tolerance."""
