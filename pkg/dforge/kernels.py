"""Dirichlet kernels L(n)(z) = exp(-lambda(n) z) with their decay and ratio certificates."""
import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence

import mpmath
import numpy as np
from sympy.polys.rings import PolyElement

from dforge.arith import Check
from dforge.coeffs import coeff_add, coeff_equal, constant, gauss, log_of, parse_rational
from dforge.config import get_settings
from dforge.exceptions import CertificateViolation, DomainError, InvalidParameter

logger = logging.getLogger(__name__)

# exp(-t) underflows doubles beyond about t = 745
UNDERFLOW_EXPONENT = 700.0
MORPHISM_HORIZON = 1024
FLOAT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LambdaSeq:
    """Exponent sequence lambda(n), claimed to satisfy lambda(n) >= declared_c * log n"""
    name: str
    values: Callable[[np.ndarray], np.ndarray]
    declared_c: float
    exact: Optional[Callable[[int], PolyElement]] = None
    mp_value: Optional[Callable[[int], object]] = None
    ratio: Optional[Callable[[int], float]] = None
    log_scale: Optional[float] = None
    table_size: Optional[int] = None
    geometric: bool = False
    monotone_checked_to: int = 0

    def __call__(self, n: int) -> float:
        self._check_index(n)
        return float(self.values(np.array([n], dtype=np.float64))[0])

    def mp(self, n: int):
        self._check_index(n)
        if self.mp_value is not None:
            return self.mp_value(n)
        return mpmath.mpf(self(n))

    def _check_index(self, n: int) -> None:
        if n < 1 or (self.table_size is not None and n > self.table_size):
            raise InvalidParameter(f"lambda '{self.name}' is not defined at n={n}")


def log_lambda(beta=1) -> LambdaSeq:
    """lambda(n) = beta log n; beta = 1 is the classical exponent"""
    beta = parse_rational(beta)
    if beta <= 0:
        raise InvalidParameter(f"beta must be positive, got {beta}")
    b = float(beta)
    exact_beta = gauss(beta)
    return LambdaSeq(
        name="log" if beta == 1 else f"{beta}*log",
        values=lambda n: b * np.log(n),
        declared_c=b,
        exact=lambda n: log_of(n) * exact_beta,
        mp_value=lambda n: mpmath.mpf(beta.numerator) / beta.denominator * mpmath.log(n),
        # (1 - log n0 / log n) increases in n, so n = n0 + 1 is the infimum
        ratio=lambda n0: b * (1 - math.log(n0) / math.log(n0 + 1)),
        log_scale=b,
    )


def linear_lambda(c=1) -> LambdaSeq:
    """lambda(n) = n, declared against c log n (n / log n >= e, so c <= e holds)"""
    return LambdaSeq(
        name="n",
        values=lambda n: np.asarray(n, dtype=np.float64),
        declared_c=float(parse_rational(c)),
        exact=lambda n: constant(n),
        mp_value=lambda n: mpmath.mpf(n),
        # (n - n0) / log n increases for n > n0
        ratio=lambda n0: 1 / math.log(n0 + 1),
        geometric=True,
    )


def table_lambda(values: Sequence, c) -> LambdaSeq:
    """lambda(n) = values[n - 1], exact rationals, defined for n <= len(values)"""
    fractions = [parse_rational(v) for v in values]
    if not fractions:
        raise InvalidParameter("a lambda table needs at least one value")
    floats = np.array([0.0] + [float(v) for v in fractions])
    return LambdaSeq(
        name="table",
        values=lambda n: floats[np.asarray(n, dtype=np.int64)],
        declared_c=float(parse_rational(c)),
        exact=lambda n: constant(fractions[n - 1]),
        mp_value=lambda n: mpmath.mpf(fractions[n - 1].numerator) / fractions[n - 1].denominator,
        table_size=len(fractions),
    )


@dataclass(frozen=True)
class Kernel:
    lam: LambdaSeq
    decay_c: float
    domain_k: float = 0.0
    is_monoid_morphism: bool = False
    morphism_witness: Optional[tuple] = None
    audit_horizon: int = 0
    classical: bool = False
    _ratio_cache: Dict[int, float] = field(default_factory=dict, compare=False, repr=False)

    def decay_C(self, z: complex) -> float:
        return 1.0

    def geometric_tail(self, C: float, k: float, x: float, N: int) -> Optional[float]:
        """C * sum over n > N of n**k exp(-n x) for lambda(n) = n, by ratio comparison; None otherwise"""
        if not self.lam.geometric or x <= 0:
            return None
        q = math.exp(-x) * max(1.0, ((N + 2) / (N + 1)) ** k)
        if q >= 1:
            return None
        return C * (N + 1) ** k * math.exp(-(N + 1) * x) / (1 - q)

    def ratio_C(self, n0: int) -> float:
        """C(n0) with |L(n)(x) / L(n0)(x)| <= n**(-C(n0) x) for n > n0"""
        if self.lam.ratio is not None:
            return self.lam.ratio(n0)
        cached = self._ratio_cache.get(n0)
        if cached is not None:
            return cached
        top = self.audit_horizon
        if top <= n0:
            raise InvalidParameter(f"ratio constant at n0={n0} needs an audit horizon above {n0}")
        n = np.arange(n0 + 1, top + 1, dtype=np.float64)
        ratios = (self.lam.values(n) - self.lam(n0)) / np.log(n)
        value = max(float(ratios.min()), np.finfo(float).tiny)
        return self._ratio_cache.setdefault(n0, value)

    @property
    def max_n(self) -> Optional[int]:
        return self.lam.table_size

    def audit(self) -> dict:
        return {
            "lambda": self.lam.name,
            "decay_c": self.decay_c,
            "decay_C": 1.0,
            "domain_k": self.domain_k,
            "audit_horizon": self.audit_horizon,
            "monoid_morphism": self.is_monoid_morphism,
            "morphism_witness": list(self.morphism_witness) if self.morphism_witness else None,
        }


def classical_kernel() -> Kernel:
    """L(n)(z) = n**-z"""
    return Kernel(lam=log_lambda(1), decay_c=1.0, is_monoid_morphism=True, classical=True)


def is_monoid_morphism(L: Kernel, horizon: int) -> Check:
    """lambda(ab) = lambda(a) + lambda(b) for ab <= horizon.

    Exact when lambda has a closed form, otherwise within a 1e-12 relative
    tolerance. Pairs with a factor 1 all reduce to lambda(1) = 0, checked last.
    """
    if horizon < 2:
        raise InvalidParameter(f"morphism horizon must be >= 2, got {horizon}")
    lam = L.lam
    if lam.table_size is not None:
        horizon = min(horizon, lam.table_size)

    def holds(a, b):
        if lam.exact is not None:
            return coeff_equal(lam.exact(a * b), coeff_add(lam.exact(a), lam.exact(b)))
        lhs, rhs = lam(a * b), lam(a) + lam(b)
        return abs(lhs - rhs) <= FLOAT_TOLERANCE * max(1.0, abs(lhs))

    for a in range(2, math.isqrt(horizon) + 1):
        for b in range(a, horizon // a + 1):
            if not holds(a, b):
                return Check(False, (a, b))
    if not holds(1, 1):
        return Check(False, (1, 1))
    return Check(True)


def general_kernel(lam: LambdaSeq, audit_horizon: Optional[int] = None) -> Kernel:
    """Audit lambda (strictly increasing, lambda(n) >= c log n) and wrap it as a kernel"""
    horizon = audit_horizon or get_settings().audit_horizon
    if lam.table_size is not None:
        horizon = min(horizon, lam.table_size)
    if lam.declared_c <= 0:
        raise InvalidParameter(f"declared c must be positive, got {lam.declared_c}")

    n = np.arange(1, horizon + 1, dtype=np.float64)
    values = lam.values(n)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmin(np.isfinite(values))) + 1
        raise CertificateViolation(bad, "lambda is not finite")
    steps = np.diff(values)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 2
        raise CertificateViolation(bad, f"lambda is not strictly increasing ({lam(bad - 1)} -> {lam(bad)})")
    floor = lam.declared_c * np.log(n)
    short = values < floor - FLOAT_TOLERANCE * np.maximum(1.0, floor)
    if np.any(short):
        bad = int(np.argmax(short)) + 1
        raise CertificateViolation(bad, f"lambda({bad}) = {lam(bad)} < {lam.declared_c} log {bad}")

    audited = replace(lam, monotone_checked_to=horizon)
    check = is_monoid_morphism(Kernel(lam=audited, decay_c=lam.declared_c), min(horizon, MORPHISM_HORIZON))
    logger.info("kernel %s audited to %d (monoid morphism: %s)", lam.name, horizon, check.holds)
    return Kernel(
        lam=audited,
        decay_c=lam.declared_c,
        is_monoid_morphism=check.holds,
        morphism_witness=check.witness,
        audit_horizon=horizon,
        classical=lam.log_scale == 1.0,
    )


def power_kernel(beta) -> Kernel:
    """L(n)(z) = n**(-beta z)"""
    return general_kernel(log_lambda(beta))


def linear_kernel(c=1) -> Kernel:
    """L(n)(z) = exp(-n z)"""
    return general_kernel(linear_lambda(c))


def table_kernel(values: Sequence, c) -> Kernel:
    return general_kernel(table_lambda(values, c))


# --- evaluation -----------------------------------------------------------

def _check_domain(L: Kernel, z: complex) -> None:
    if complex(z).real <= L.domain_k:
        raise DomainError(f"Re z = {complex(z).real} is outside the half-plane Re z > {L.domain_k}")


def kernel_eval(L: Kernel, n: int, z: complex):
    """exp(-lambda(n) z); falls back to an mpmath value instead of underflowing to 0"""
    z = complex(z)
    _check_domain(L, z)
    lam = L.lam(n)
    if lam * z.real > UNDERFLOW_EXPONENT:
        return kernel_mp(L, n, z.real if z.imag == 0 else z)
    if L.lam.log_scale is not None:
        return complex(n) ** (-L.lam.log_scale * z)
    return cmath.exp(-lam * z)


def kernel_values(L: Kernel, nmax: int, z: complex) -> np.ndarray:
    """L(n)(z) for n <= nmax as a complex table (slot 0 is zero); tiny terms underflow to 0"""
    z = complex(z)
    _check_domain(L, z)
    if L.max_n is not None and nmax > L.max_n:
        raise InvalidParameter(f"kernel '{L.lam.name}' is only defined up to n={L.max_n}")
    out = np.zeros(nmax + 1, dtype=np.complex128)
    n = np.arange(1, nmax + 1, dtype=np.float64)
    with np.errstate(under="ignore"):
        if L.lam.log_scale is not None:
            out[1:] = n.astype(np.complex128) ** (-L.lam.log_scale * z)
        else:
            out[1:] = np.exp(-L.lam.values(n) * z)
    return out


def kernel_mp(L: Kernel, n: int, x):
    """L(n)(x) at the current mpmath precision"""
    return mpmath.exp(-L.lam.mp(n) * mpmath.mpmathify(x))


def kernel_from_beta(beta: Fraction) -> Kernel:
    if beta == 1:
        return classical_kernel()
    return power_kernel(beta)
