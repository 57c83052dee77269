"""Shared vocabulary for measurement predictions.

Both the stabilizer oracle and the hidden-variable model classify a signed
Pauli measurement as definitely +1, definitely -1, or uniformly random.
"""

from __future__ import annotations

import enum


class PredictionKind(enum.Enum):
    """Outcome class of a Pauli-product measurement on a stabilizer state."""

    DEFINITE_PLUS = "definite_plus"
    DEFINITE_MINUS = "definite_minus"
    RANDOM = "random"

    @property
    def expectation(self) -> int:
        """Expectation value: +1, -1, or 0."""
        if self is PredictionKind.DEFINITE_PLUS:
            return 1
        if self is PredictionKind.DEFINITE_MINUS:
            return -1
        return 0

    @property
    def is_definite(self) -> bool:
        return self is not PredictionKind.RANDOM


def definite_kind(sign: int) -> PredictionKind:
    """The definite kind with the given sign (+1 or -1)."""
    if sign == 1:
        return PredictionKind.DEFINITE_PLUS
    if sign == -1:
        return PredictionKind.DEFINITE_MINUS
    raise ValueError(f"sign must be +1 or -1, got {sign}")
