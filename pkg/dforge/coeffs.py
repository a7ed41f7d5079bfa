"""Exact coefficient values.

Scalars are sympy Gaussian rationals (QQ_I). A coefficient alpha(n) is a
polynomial in z over QQ_I; coefficients that involve logarithms (derivatives,
von Mangoldt) live in a larger ring whose extra generators are the formal
symbols log_p, one per prime p below a power-of-two bound. Rings are nested by
their symbol lists, so any two coefficients can be lifted to a common ring.
"""
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Integral
from typing import Iterable, Tuple

import mpmath
from sympy import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing

from dforge.exceptions import BadRational

GaussRational = type(QQ_I.one)
PolyCoeff = PolyElement

Z_RING = PolyRing("z", QQ_I)
Z = Z_RING.gens[0]

_I_POWERS = (QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1))


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a "p/q" / decimal string"""
    if isinstance(value, bool):
        raise BadRational(str(value))
    if isinstance(value, (Integral, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise BadRational(value)
    raise BadRational(repr(value))


def qq(value) -> "QQ.dtype":
    fr = parse_rational(value)
    return QQ(fr.numerator, fr.denominator)


def gauss(value) -> GaussRational:
    """Coerce to a Gaussian rational; pairs [re, im] give complex values"""
    if isinstance(value, GaussRational):
        return value
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise BadRational(repr(value))
        return QQ_I(qq(value[0]), qq(value[1]))
    return QQ_I(qq(value), QQ.zero)


def i_power(k: int) -> GaussRational:
    return _I_POWERS[k % 4]


def constant(value, ring: PolyRing = Z_RING) -> PolyElement:
    if isinstance(value, PolyElement):
        return lift(value, ring)
    return ring.ground_new(gauss(value))


def poly(coeffs: Iterable) -> PolyElement:
    """Polynomial in z from its coefficient list, lowest degree first"""
    result = Z_RING.zero
    for m, c in enumerate(coeffs):
        c = gauss(c)
        if c:
            result += Z**m * c
    return result


# --- symbolic-log rings ---------------------------------------------------

def _bound_for(p: int) -> int:
    bound = 64
    while bound < p:
        bound *= 2
    return bound


@lru_cache(maxsize=None)
def log_ring(bound: int) -> PolyRing:
    """Ring QQ_I[z, log_2, log_3, ...] with one symbol per prime <= bound"""
    from sympy import primerange

    symbols = ["z"] + [f"log_{p}" for p in primerange(2, bound + 1)]
    return PolyRing(symbols, QQ_I)


def ring_for(n: int) -> PolyRing:
    """Smallest log ring holding the symbols of every prime <= n"""
    return log_ring(_bound_for(max(n, 2)))


def log_symbol(p: int) -> PolyElement:
    R = ring_for(p)
    name = f"log_{p}"
    for g, s in zip(R.gens, R.symbols):
        if s.name == name:
            return g
    raise KeyError(name)


def log_of(n: int) -> PolyElement:
    """log n expanded over the prime symbols: sum of v_p(n) * log_p"""
    from dforge.ntheory import factorize

    factors = factorize(n)
    if not factors:
        return Z_RING.zero
    R = ring_for(factors[-1][0])
    total = R.zero
    for p, a in factors:
        total += lift(log_symbol(p), R) * a
    return total


def lift(p: PolyElement, ring: PolyRing) -> PolyElement:
    if p.ring is ring or p.ring == ring:
        return p
    if not p:
        return ring.zero
    return p.set_ring(ring)


def unify(a: PolyElement, b: PolyElement) -> Tuple[PolyElement, PolyElement]:
    """Lift two coefficients into the larger of their two rings"""
    if a.ring is b.ring or a.ring == b.ring:
        return a, b
    if a.ring.ngens >= b.ring.ngens:
        return a, lift(b, a.ring)
    return lift(a, b.ring), b


def coeff_add(a: PolyElement, b: PolyElement) -> PolyElement:
    a, b = unify(a, b)
    return a + b


def coeff_mul(a: PolyElement, b: PolyElement) -> PolyElement:
    a, b = unify(a, b)
    return a * b


def coeff_equal(a: PolyElement, b: PolyElement) -> bool:
    a, b = unify(a, b)
    return dict.__eq__(a, b)


def ground_value(p: PolyElement) -> GaussRational:
    if not p:
        return QQ_I.zero
    if not p.is_ground:
        raise ValueError(f"{p} is not a constant")
    return p.LC


def z_degree(p: PolyElement) -> int:
    return max((m[0] for m in p.itermonoms()), default=0)


def log_degree(p: PolyElement) -> int:
    """Total degree in the log symbols (generators after z)"""
    return max((sum(m[1:]) for m in p.itermonoms()), default=0)


def total_degree(p: PolyElement) -> int:
    return max((sum(m) for m in p.itermonoms()), default=0)


# --- float boundary -------------------------------------------------------

def gauss_to_complex(c: GaussRational) -> complex:
    return complex(float(c.x), float(c.y))


@lru_cache(maxsize=None)
def _log_values(ring: PolyRing) -> tuple:
    return tuple(math.log(int(s.name[4:])) for s in ring.symbols[1:])


@lru_cache(maxsize=None)
def _primes_of(ring: PolyRing) -> tuple:
    return tuple(int(s.name[4:]) for s in ring.symbols[1:])


def to_complex(p: PolyElement, z: complex = 0j) -> complex:
    """Float value of an exact coefficient at z, logs substituted numerically"""
    logs = _log_values(p.ring)
    total = 0j
    for monom, coeff in p.iterterms():
        term = gauss_to_complex(coeff)
        if monom[0]:
            term *= z ** monom[0]
        for e, lv in zip(monom[1:], logs):
            if e:
                term *= lv**e
        total += term
    return total


def to_mp(p: PolyElement, z=0):
    """mpmath value of an exact coefficient at the current working precision"""
    primes = _primes_of(p.ring)
    total = mpmath.mpc(0)
    for monom, coeff in p.iterterms():
        term = mpmath.mpc(mpmath.mpf(int(coeff.x.numerator)) / int(coeff.x.denominator),
                          mpmath.mpf(int(coeff.y.numerator)) / int(coeff.y.denominator))
        if monom[0]:
            term *= mpmath.mpmathify(z) ** monom[0]
        for e, q in zip(monom[1:], primes):
            if e:
                term *= mpmath.log(q) ** e
        total += term
    return total


def magnitude(p: PolyElement, z: complex = 0j) -> float:
    return abs(to_complex(p, z))


# --- formatting -----------------------------------------------------------

def _format_q(x) -> str:
    num, den = int(x.numerator), int(x.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_gauss(c: GaussRational) -> str:
    if not c.y:
        return _format_q(c.x)
    im = _format_q(c.y)
    if not c.x:
        return f"{im}i"
    sign = "" if im.startswith("-") else "+"
    return f"{_format_q(c.x)}{sign}{im}i"


def format_coeff(p: PolyElement) -> str:
    if p.is_ground:
        return format_gauss(ground_value(p))
    return str(p.as_expr())
