"""Exception types raised by the simulator."""


class LgpovmError(Exception):
    """Base class for all simulator errors."""


class InvalidInputError(LgpovmError, ValueError):
    """An argument is outside the domain an operation accepts."""


class InvalidStateError(InvalidInputError):
    """A matrix passed as a density operator is not Hermitian, unit-trace and PSD."""


class OutcomeImpossibleError(LgpovmError, ArithmeticError):
    """A measurement outcome has (numerically) zero probability, so conditioning on it is ill-posed."""

    def __init__(self, sign, probability):
        self.sign = sign
        self.probability = probability
        super().__init__(
            f"outcome {'+' if sign > 0 else '-'} has probability {probability:.3e}; "
            "conditional state is undefined"
        )
