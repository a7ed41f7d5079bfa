from typing import Optional


class DforgeError(Exception):
    """Base error: carries a process exit code and a human-readable detail"""
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"type": type(self).__name__, "detail": self.detail}


class InvalidParameter(DforgeError, ValueError):
    pass


class NotInvertible(DforgeError):
    pass


class FactorizationOverflow(DforgeError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"{n} exceeds the factorization horizon {limit}")
        self.n = n
        self.limit = limit


class NotMultiplicative(DforgeError):
    def __init__(self, name: str, witness: tuple):
        super().__init__(f"{name} is not multiplicative (witness {witness})")
        self.witness = witness


class CertificateMissing(DforgeError):
    pass


class CertificateViolation(DforgeError):
    def __init__(self, n: int, detail: str):
        super().__init__(f"certificate fails at n={n}: {detail}")
        self.n = n


class DomainError(DforgeError):
    pass


class Divergent(DforgeError):
    pass


class BudgetExceeded(DforgeError):
    pass


class NotMorphism(DforgeError):
    pass


class RecoveryUncertain(DforgeError):
    def __init__(self, n0: int, majorant: float):
        super().__init__(f"coefficient {n0} cannot be recovered (error majorant {majorant:.3g})")
        self.n0 = n0
        self.majorant = majorant


class NonFinite(DforgeError):
    def __init__(self, x: float):
        super().__init__(f"probe value is not finite at x={x}")
        self.x = x


class UnsupportedCoefficients(DforgeError):
    pass


class ParseError(DforgeError):
    def __init__(self, detail: str, field: Optional[str] = None):
        super().__init__(f"{field}: {detail}" if field else detail)
        self.field = field


class UnknownFunction(ParseError):
    def __init__(self, name: str):
        super().__init__(f"unknown function '{name}'", field="functions")
        self.name = name


class BadRational(ParseError):
    def __init__(self, text: str):
        super().__init__(f"cannot parse '{text}' as an exact rational")
        self.text = text
