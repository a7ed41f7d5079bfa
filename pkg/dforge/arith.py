"""The Dirichlet ring of arithmetic functions with polynomial-in-z coefficients.

An ArithFunc is a pure rule n -> coefficient with an append-only memo cache.
Every function may carry a GrowthCertificate |alpha(n)(z)| <= C(z) * n**k that
the series engine turns into truncation tails, and a float path returning a
whole numpy table at once.
"""
import copy
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ_I
from sympy.polys.rings import PolyElement

from dforge.coeffs import (
    Z_RING,
    coeff_add,
    coeff_equal,
    coeff_mul,
    constant,
    format_coeff,
    ground_value,
    log_of,
    to_complex,
)
from dforge.config import get_settings
from dforge.exceptions import InvalidParameter, NotInvertible, NotMultiplicative
from dforge.ntheory import (
    convolve_tables,
    divisors,
    factorize,
    inverse_table,
    log_table,
    multiplicative_table,
    primes_up_to,
)

logger = logging.getLogger(__name__)

Rule = Callable[[int], PolyElement]
NumericRule = Callable[[int, complex], np.ndarray]
PrimePowerRule = Callable[[int, int], object]


@dataclass(frozen=True)
class GrowthCertificate:
    """Declared bound |alpha(n)(z)| <= magnitude(z) * n**k; alpha(n) = 0 for n > support"""
    k: float
    magnitude: Callable[[complex], float]
    support: Optional[int] = None
    note: str = "declared"

    @classmethod
    def bounded(cls, k, C, support: Optional[int] = None, note: str = "declared") -> "GrowthCertificate":
        C = float(C)
        return cls(float(k), lambda z: C, support, note)

    def constant_at(self, z: complex) -> float:
        return float(self.magnitude(z))

    def to_dict(self, z: complex) -> dict:
        return {"k": self.k, "C": self.constant_at(z), "support": self.support, "note": self.note}


class Check(NamedTuple):
    holds: bool
    witness: Optional[tuple] = None


class ArithFunc:
    def __init__(
        self,
        rule: Rule,
        name: str = "alpha",
        certificate: Optional[GrowthCertificate] = None,
        numeric: Optional[NumericRule] = None,
        prime_power: Optional[PrimePowerRule] = None,
    ):
        self._rule = rule
        self._cache: Dict[int, PolyElement] = {}
        self._pp_cache: Dict[Tuple[int, int], PolyElement] = {}
        self._numeric = numeric
        self._prime_power = prime_power
        self.name = name
        self.certificate = certificate

    def __call__(self, n: int) -> PolyElement:
        if n < 1:
            raise InvalidParameter(f"arithmetic functions are indexed by n >= 1, got {n}")
        value = self._cache.get(n)
        if value is None:
            # pure rules make a concurrent double computation harmless
            value = self._cache.setdefault(n, self._rule(n))
        return value

    @property
    def is_built_multiplicative(self) -> bool:
        """True when the function was built from prime-power values"""
        return self._prime_power is not None

    def at_prime_power(self, p: int, a: int) -> PolyElement:
        if a == 0:
            return self(1)
        if self._prime_power is None:
            return self(p**a)
        key = (p, a)
        value = self._pp_cache.get(key)
        if value is None:
            value = self._prime_power(p, a)
            if not isinstance(value, PolyElement):
                value = constant(value)
            value = self._pp_cache.setdefault(key, value)
        return value

    def values(self, nmax: int, z: complex = 0j) -> np.ndarray:
        """Float table of alpha(n)(z) for n <= nmax (slot 0 is zero)"""
        if self._numeric is not None:
            return self._numeric(nmax, z)
        if self._prime_power is not None:
            return multiplicative_table(nmax, lambda p, a: to_complex(self.at_prime_power(p, a), z))
        table = np.zeros(nmax + 1, dtype=np.complex128)
        top = nmax
        if self.certificate is not None and self.certificate.support is not None:
            top = min(nmax, self.certificate.support)
        for n in range(1, top + 1):
            table[n] = to_complex(self(n), z)
        return table

    def with_certificate(self, certificate: Optional[GrowthCertificate]) -> "ArithFunc":
        """Copy sharing the rule and memo cache, with another certificate"""
        twin = copy.copy(self)
        twin.certificate = certificate
        return twin

    def certified(self, k, C, support: Optional[int] = None, note: str = "declared") -> "ArithFunc":
        return self.with_certificate(GrowthCertificate.bounded(k, C, support, note))

    def renamed(self, name: str) -> "ArithFunc":
        twin = copy.copy(self)
        twin.name = name
        return twin

    def __repr__(self) -> str:
        return f"ArithFunc({self.name})"


def eval_coeff(alpha: ArithFunc, n: int) -> PolyElement:
    return alpha(n)


# --- ring operations ------------------------------------------------------

def unity() -> ArithFunc:
    """e: e(1) = 1 and e(n) = 0 otherwise"""
    def numeric(nmax, z):
        table = np.zeros(nmax + 1, dtype=np.complex128)
        if nmax >= 1:
            table[1] = 1.0
        return table

    return ArithFunc(
        lambda n: Z_RING.one if n == 1 else Z_RING.zero,
        name="e",
        certificate=GrowthCertificate.bounded(0, 1, support=1),
        numeric=numeric,
        prime_power=lambda p, a: 0,
    )


def add(alpha: ArithFunc, beta: ArithFunc) -> ArithFunc:
    ca, cb = alpha.certificate, beta.certificate
    certificate = None
    if ca is not None and cb is not None:
        support = max(ca.support, cb.support) if ca.support and cb.support else None
        certificate = GrowthCertificate(
            max(ca.k, cb.k), lambda z: ca.magnitude(z) + cb.magnitude(z), support, "sum"
        )
    return ArithFunc(
        lambda n: coeff_add(alpha(n), beta(n)),
        name=f"({alpha.name}+{beta.name})",
        certificate=certificate,
        numeric=lambda nmax, z: alpha.values(nmax, z) + beta.values(nmax, z),
    )


def scale(f, alpha: ArithFunc) -> ArithFunc:
    """(f alpha)(n) = f * alpha(n) for a scalar or a polynomial f in z"""
    fc = constant(f)
    ca = alpha.certificate
    certificate = None
    if ca is not None:
        certificate = GrowthCertificate(
            ca.k, lambda z: abs(to_complex(fc, z)) * ca.magnitude(z), ca.support, "scaled"
        )
    return ArithFunc(
        lambda n: coeff_mul(fc, alpha(n)),
        name=f"{format_coeff(fc)}*{alpha.name}",
        certificate=certificate,
        numeric=lambda nmax, z: to_complex(fc, z) * alpha.values(nmax, z),
    )


@lru_cache(maxsize=None)
def divisor_constant(eps: float) -> float:
    """Bound C with d(n) <= C * n**eps for every n.

    d(n)/n**eps is multiplicative; its prime-power factors (a+1)/p**(a eps)
    never exceed 1 once p >= 2**(1/eps), so only smaller primes contribute.
    """
    if eps <= 0:
        raise InvalidParameter(f"divisor slack must be positive, got {eps}")
    total = 1.0
    for p in primes_up_to(int(2 ** (1 / eps))):
        peak = math.ceil(1 / (eps * math.log(p))) + 1
        total *= max((a + 1) / p ** (a * eps) for a in range(peak + 1))
    return total * (1 + 1e-12)


def _convolution_certificate(ca, cb) -> Optional[GrowthCertificate]:
    if ca is None or cb is None:
        return None
    k = max(ca.k, cb.k)
    supports = [s for s in (ca.support, cb.support) if s is not None]
    if supports:
        # at most min(support) nonzero terms, each <= Ca Cb n**k
        terms = min(supports)
        support = ca.support * cb.support if len(supports) == 2 else None
        return GrowthCertificate(
            k, lambda z: ca.magnitude(z) * cb.magnitude(z) * terms, support, "convolution"
        )
    eps = get_settings().divisor_slack
    cd = divisor_constant(eps)
    return GrowthCertificate(
        k + eps,
        lambda z: ca.magnitude(z) * cb.magnitude(z) * cd,
        None,
        f"convolution with divisor slack {eps}",
    )


def convolve(alpha: ArithFunc, beta: ArithFunc) -> ArithFunc:
    """Dirichlet convolution (alpha beta)(n) = sum over ab = n of alpha(a) beta(b)"""
    def rule(n):
        total = Z_RING.zero
        for a in divisors(n):
            left = alpha(a)
            if not left:
                continue
            right = beta(n // a)
            if right:
                total = coeff_add(total, coeff_mul(left, right))
        return total

    name = f"({alpha.name}*{beta.name})"
    certificate = _convolution_certificate(alpha.certificate, beta.certificate)
    if alpha.is_built_multiplicative and beta.is_built_multiplicative:
        # multiplicative again: only prime powers need the divisor sum
        def prime_power(p, a):
            total = Z_RING.zero
            for i in range(a + 1):
                total = coeff_add(total, coeff_mul(alpha.at_prime_power(p, i), beta.at_prime_power(p, a - i)))
            return total

        return from_prime_powers(prime_power, name=name, certificate=certificate)

    return ArithFunc(
        rule,
        name=name,
        certificate=certificate,
        numeric=lambda nmax, z: convolve_tables(alpha.values(nmax, z), beta.values(nmax, z)),
    )


def power(alpha: ArithFunc, i: int) -> ArithFunc:
    """i-fold convolution power; alpha**0 = e"""
    if i < 0:
        raise InvalidParameter(f"convolution powers need i >= 0, got {i}")
    if i == 0:
        return unity()
    result = alpha
    for _ in range(i - 1):
        result = convolve(result, alpha)
    return result.renamed(alpha.name if i == 1 else f"{alpha.name}^{i}")


def dirichlet_inverse(alpha: ArithFunc) -> ArithFunc:
    """Convolution inverse via inv(n) = -alpha(1)^-1 * sum over d | n, d < n of alpha(n/d) inv(d).

    The result carries no growth certificate; attach one with `certified`.
    """
    head = alpha(1)
    if not head:
        raise NotInvertible(f"{alpha.name}(1) = 0")
    if not head.is_ground:
        raise NotInvertible(f"{alpha.name}(1) = {format_coeff(head)} is not a constant")
    unit = constant(QQ_I.one / ground_value(head))

    def rule(n):
        if n == 1:
            return unit
        total = Z_RING.zero
        for d in divisors(n)[:-1]:
            total = coeff_add(total, coeff_mul(alpha(n // d), inverse(d)))
        return -coeff_mul(unit, total)

    name = f"{alpha.name}^-1"
    if alpha.is_built_multiplicative:
        # alpha(1) = 1; the recurrence only runs along the powers of each prime
        def prime_power(p, a):
            total = Z_RING.zero
            for i in range(1, a + 1):
                total = coeff_add(total, coeff_mul(alpha.at_prime_power(p, i), inverse.at_prime_power(p, a - i)))
            return -total

        inverse = from_prime_powers(prime_power, name=name)
        return inverse

    inverse = ArithFunc(rule, name=name, numeric=lambda nmax, z: inverse_table(alpha.values(nmax, z)))
    return inverse


def derivative(alpha: ArithFunc, j: int) -> ArithFunc:
    """alpha^(j)(n) = (-1)^j alpha(n) log(n)^j, with log n kept as a sum of log_p symbols"""
    if j < 0:
        raise InvalidParameter(f"derivative order must be >= 0, got {j}")
    if j == 0:
        return alpha
    sign = -1 if j % 2 else 1

    def rule(n):
        value = alpha(n)
        if n == 1 or not value:
            return Z_RING.zero
        return coeff_mul(value, log_of(n) ** j) * sign

    ca = alpha.certificate
    certificate = None
    if ca is not None:
        if ca.support is not None:
            bound = math.log(ca.support) ** j
            certificate = GrowthCertificate(
                ca.k, lambda z: ca.magnitude(z) * bound, ca.support, f"derivative of order {j}"
            )
        else:
            # log(n)^j <= (j / (e eps))^j * n**eps
            eps = get_settings().divisor_slack
            bound = (j / (math.e * eps)) ** j
            certificate = GrowthCertificate(
                ca.k + eps, lambda z: ca.magnitude(z) * bound, None, f"derivative of order {j} with log slack {eps}"
            )

    return ArithFunc(
        rule,
        name=f"{alpha.name}^({j})",
        certificate=certificate,
        numeric=lambda nmax, z: alpha.values(nmax, z) * (-log_table(nmax)) ** j,
    )


def from_prime_powers(
    rule: PrimePowerRule,
    name: str = "multiplicative",
    certificate: Optional[GrowthCertificate] = None,
    numeric: Optional[NumericRule] = None,
) -> ArithFunc:
    """The multiplicative function with f(1) = 1 and f(p^a) = rule(p, a)"""
    def value(n):
        total = Z_RING.one
        for p, a in factorize(n):
            total = coeff_mul(total, func.at_prime_power(p, a))
        return total

    func = ArithFunc(value, name=name, certificate=certificate, numeric=numeric, prime_power=rule)
    return func


# --- checks ---------------------------------------------------------------

def is_multiplicative(alpha: ArithFunc, horizon: int) -> Check:
    """alpha(1) = 1 and alpha(nm) = alpha(n) alpha(m) for coprime n, m with nm <= horizon"""
    if horizon < 2:
        raise InvalidParameter(f"multiplicativity horizon must be >= 2, got {horizon}")
    if not coeff_equal(alpha(1), Z_RING.one):
        return Check(False, (1,))
    for q in range(2, horizon + 1):
        for n in divisors(q):
            m = q // n
            if n >= m:
                break
            if n == 1 or math.gcd(n, m) != 1:
                continue
            if not coeff_equal(alpha(q), coeff_mul(alpha(n), alpha(m))):
                return Check(False, (n, m))
    return Check(True)


@dataclass(frozen=True)
class EquivalenceVerdict:
    exceptional_primes: Tuple[int, ...]
    horizon_p: int
    horizon_j: int

    @property
    def supported(self) -> bool:
        """No exceptional prime in the upper half (horizon_p / 2, horizon_p]"""
        return all(2 * p <= self.horizon_p for p in self.exceptional_primes)


def equivalent(alpha: ArithFunc, beta: ArithFunc, horizon_p: int, horizon_j: int) -> EquivalenceVerdict:
    """Primes p <= horizon_p where alpha(p^j) != beta(p^j) for some j <= horizon_j.

    Equivalence itself is only semi-decidable: a finite exceptional set on a
    finite horizon is evidence, not proof.
    """
    if horizon_p < 2 or horizon_j < 1:
        raise InvalidParameter("equivalence needs horizon_p >= 2 and horizon_j >= 1")
    check_horizon = get_settings().multiplicative_horizon
    for f in (alpha, beta):
        check = is_multiplicative(f, check_horizon)
        if not check.holds:
            raise NotMultiplicative(f.name, check.witness)
    primes = primes_up_to(horizon_p)
    exceptional = tuple(
        p
        for p in primes
        if any(
            not coeff_equal(alpha.at_prime_power(p, j), beta.at_prime_power(p, j))
            for j in range(1, horizon_j + 1)
        )
    )
    logger.info("%s vs %s: %d exceptional primes up to %d", alpha.name, beta.name, len(exceptional), horizon_p)
    return EquivalenceVerdict(exceptional, primes[-1], horizon_j)


def growth_check(alpha: ArithFunc, k: float, horizon: int, z_grid: Sequence[complex] = (2,)) -> float:
    """max over n <= horizon and z in z_grid of |alpha(n)(z)| / n**k.

    This measures the constant on a finite horizon; it is not a proof for all n.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be >= 1, got {horizon}")
    n = np.arange(1, horizon + 1, dtype=np.float64)
    weights = n ** float(k)
    worst = 0.0
    for z in z_grid:
        ratios = np.abs(alpha.values(horizon, complex(z))[1:]) / weights
        worst = max(worst, float(ratios.max()))
    return worst


def agrees(alpha: ArithFunc, beta: ArithFunc, horizon: int) -> Optional[int]:
    """First n <= horizon with alpha(n) != beta(n), or None"""
    for n in range(1, horizon + 1):
        if not coeff_equal(alpha(n), beta(n)):
            return n
    return None
