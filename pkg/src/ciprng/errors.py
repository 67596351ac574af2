"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates an operation's precondition."""


class SeedError(ContractError):
    """A sub-generator seed is unusable (zero, or not a 32-bit word)."""


class LengthError(ContractError):
    """A bit sequence is too short for the requested statistical test."""


class ParameterError(ContractError):
    """A test parameter (block or pattern length) is out of range for the input."""


class SampleSizeError(ContractError):
    """Too few p-values for the uniformity meta-test."""


class InputError(ContractError):
    """A collection of inputs is empty or inconsistent."""
