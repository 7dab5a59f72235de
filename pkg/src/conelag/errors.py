"""Exception types raised by the numerical routines."""


class ConeError(ValueError):
    """Base class for domain violations."""


class NonPositiveMinor(ConeError):
    pass


class SingularCayley(ConeError):
    pass


class SingularShift(ConeError):
    pass


class GammaPole(ConeError):
    def __init__(self, index, value):
        super().__init__(f"gamma pole at index {index} (argument {value})")
        self.index = index
        self.value = value


class ZeroDenominator(ConeError):
    pass


class SingularInterpolation(ConeError):
    pass


class UnsupportedRank(ConeError):
    pass


class UnsupportedCone(ConeError):
    pass


class UncalibratedQuadrature(RuntimeError):
    pass


class DegenerateCoefficient(ConeError):
    pass


class TruncationWarning(UserWarning):
    pass
