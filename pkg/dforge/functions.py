"""Named arithmetic functions, Dirichlet characters and user tables."""
import math
import re
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from sympy import isprime, totient
from sympy.ntheory import discrete_log, primitive_root

from dforge.arith import ArithFunc, GrowthCertificate, divisor_constant, from_prime_powers, unity
from dforge.coeffs import Z_RING, constant, gauss, gauss_to_complex, i_power, log_symbol, poly, to_complex
from dforge.config import get_settings
from dforge.exceptions import InvalidParameter, UnknownFunction, UnsupportedCoefficients
from dforge.ntheory import factorize, mangoldt_table

CHARACTER_MODULUS_LIMIT = 100
_CHARACTER_NAME = re.compile(r"^chi_(\d+)((?:_\d+)*)$")


def _ones(nmax, z):
    table = np.ones(nmax + 1, dtype=np.complex128)
    table[0] = 0.0
    return table


def _identity(nmax, z):
    return np.arange(nmax + 1, dtype=np.complex128)


def zero() -> ArithFunc:
    return ArithFunc(
        lambda n: Z_RING.zero,
        name="zero",
        certificate=GrowthCertificate.bounded(0, 0, support=1),
        numeric=lambda nmax, z: np.zeros(nmax + 1, dtype=np.complex128),
    )


def one() -> ArithFunc:
    return from_prime_powers(lambda p, a: 1, name="one", certificate=GrowthCertificate.bounded(0, 1), numeric=_ones)


def identity() -> ArithFunc:
    """N(n) = n"""
    return from_prime_powers(
        lambda p, a: p**a, name="N", certificate=GrowthCertificate.bounded(1, 1), numeric=_identity
    )


def mobius() -> ArithFunc:
    return from_prime_powers(
        lambda p, a: -1 if a == 1 else 0, name="mu", certificate=GrowthCertificate.bounded(0, 1)
    )


def divisor_count() -> ArithFunc:
    eps = get_settings().divisor_slack
    return from_prime_powers(
        lambda p, a: a + 1,
        name="d",
        certificate=GrowthCertificate.bounded(eps, divisor_constant(eps), note=f"d(n) <= C n^{eps}"),
    )


def liouville() -> ArithFunc:
    return from_prime_powers(
        lambda p, a: -1 if a % 2 else 1, name="lambda_liouville", certificate=GrowthCertificate.bounded(0, 1)
    )


def von_mangoldt() -> ArithFunc:
    """Lambda(p^a) = log p, kept as the formal symbol log_p"""
    def rule(n):
        factors = factorize(n)
        if len(factors) != 1:
            return Z_RING.zero
        return log_symbol(factors[0][0])

    # log n <= n**eps / (e eps)
    eps = get_settings().divisor_slack
    return ArithFunc(
        rule,
        name="vonmangoldt",
        certificate=GrowthCertificate.bounded(eps, 1 / (math.e * eps), note=f"log n <= n^{eps} / (e {eps})"),
        numeric=lambda nmax, z: mangoldt_table(nmax).astype(np.complex128),
    )


# --- Dirichlet characters -------------------------------------------------

def _cyclic_factors(q: int) -> List[Tuple[int, int, int]]:
    """(modulus, generator, order) of each cyclic factor of (Z/q)^*, primes ascending"""
    factors = []
    for p, a in factorize(q) if q > 1 else ():
        pa = p**a
        if p == 2:
            if a == 2:
                factors.append((4, 3, 2))
            elif a >= 3:
                factors.append((pa, pa - 1, 2))
                factors.append((pa, 5, pa // 4))
        else:
            factors.append((pa, primitive_root(pa), int(totient(pa))))
    return factors


def _exponents(n: int, factors) -> List[int]:
    """Discrete logs of n in each cyclic factor"""
    out = []
    i = 0
    while i < len(factors):
        modulus, g, order = factors[i]
        r = n % modulus
        if modulus >= 8 and modulus % 2 == 0:
            # (Z/2^a)^* = <-1> x <5>
            s = 0 if r % 4 == 1 else 1
            r5 = r if s == 0 else (-r) % modulus
            out.append(s)
            out.append(discrete_log(modulus, r5, 5) % factors[i + 1][2])
            i += 2
            continue
        out.append(0 if r == 1 else discrete_log(modulus, r, g))
        i += 1
    return out


def character(q: int, twists: Sequence[int] = ()) -> ArithFunc:
    """Dirichlet character mod q sending the i-th cyclic generator to exp(2 pi i t_i / o_i).

    Only characters of order dividing 4 are representable exactly (values in
    {0, 1, -1, i, -i}).
    """
    if not 1 <= q <= CHARACTER_MODULUS_LIMIT:
        raise InvalidParameter(f"character modulus must lie in [1, {CHARACTER_MODULUS_LIMIT}], got {q}")
    factors = _cyclic_factors(q)
    twists = list(twists) or [0] * len(factors)
    if len(twists) != len(factors):
        raise InvalidParameter(f"(Z/{q})^* has {len(factors)} cyclic factors, got {len(twists)} twists")
    quarter_turns = []
    for t, (_, _, order) in zip(twists, factors):
        if (4 * t) % order:
            raise UnsupportedCoefficients(f"chi mod {q} with twists {twists} has values outside Q(i)")
        quarter_turns.append(4 * t // order)

    residues = []
    for r in range(q):
        if math.gcd(r, q) != 1:
            residues.append(Z_RING.zero if q > 1 else Z_RING.one)
            continue
        turns = sum(u * e for u, e in zip(quarter_turns, _exponents(r, factors)))
        residues.append(constant(i_power(turns)))
    floats = np.array([to_complex(v) for v in residues], dtype=np.complex128)

    def numeric(nmax, z):
        table = floats[np.arange(nmax + 1) % q]
        table[0] = 0.0
        return table

    name = f"chi_{q}" + "".join(f"_{t}" for t in twists)
    return ArithFunc(
        lambda n: residues[n % q],
        name=name,
        certificate=GrowthCertificate.bounded(0, 1),
        numeric=numeric,
        prime_power=lambda p, a: residues[p % q] ** a,
    )


# --- user tables ----------------------------------------------------------

def _table_entry(value):
    if isinstance(value, (list, tuple)):
        return poly(value)
    return constant(value)


def table(values: Sequence, name: str = "table") -> ArithFunc:
    """alpha(n) = values[n - 1] for n <= len(values), zero beyond.

    Entries are exact rationals ("p/q" strings or ints) or lists of them, read
    as polynomial coefficients in z, lowest degree first.
    """
    entries = [_table_entry(v) for v in values]
    support = len(entries)
    if not support:
        raise InvalidParameter("a table needs at least one value")

    def magnitude(z):
        return max(abs(to_complex(p, z)) for p in entries) * (1 + 1e-12)

    def numeric(nmax, z):
        out = np.zeros(nmax + 1, dtype=np.complex128)
        top = min(nmax, support)
        out[1 : top + 1] = [to_complex(p, z) for p in entries[:top]]
        return out

    return ArithFunc(
        lambda n: entries[n - 1] if n <= support else Z_RING.zero,
        name=name,
        certificate=GrowthCertificate(0.0, magnitude, support, "table"),
        numeric=numeric,
    )


def with_overrides(base: ArithFunc, overrides: Mapping[int, Sequence], name: str = "multiplicative") -> ArithFunc:
    """Multiplicative function equal to base except at the listed prime powers.

    overrides[p][a - 1] replaces base(p^a); exponents beyond the list keep base.
    """
    if not base.is_built_multiplicative:
        raise InvalidParameter(f"{base.name} is not built from prime powers")
    values: Dict[int, list] = {}
    for p, entries in overrides.items():
        p = int(p)
        if not isprime(p):
            raise InvalidParameter(f"override key {p} is not a prime")
        values[p] = [gauss(v) for v in entries]

    def rule(p, a):
        entries = values.get(p)
        if entries is not None and a <= len(entries):
            return entries[a - 1]
        return base.at_prime_power(p, a)

    certificate = None
    cb = base.certificate
    if cb is not None:
        k = cb.k
        worst = {
            p: max(abs(gauss_to_complex(v)) / p ** (a * k) for a, v in enumerate(vs, start=1))
            for p, vs in values.items()
            if vs
        }

        def magnitude(z):
            c = cb.magnitude(z)
            total = c
            for m in worst.values():
                total *= max(1.0, c, m)
            return total

        certificate = GrowthCertificate(k, magnitude, None, f"{cb.note}, overridden at {sorted(values)}")
    return from_prime_powers(rule, name=name, certificate=certificate)


# --- registry -------------------------------------------------------------

BUILTINS = {
    "e": unity,
    "zero": zero,
    "one": one,
    "N": identity,
    "mu": mobius,
    "d": divisor_count,
    "lambda_liouville": liouville,
    "vonmangoldt": von_mangoldt,
}


@lru_cache(maxsize=None)
def builtin(name: str) -> ArithFunc:
    """Built-in function by name; characters are addressed as chi_q or chi_q_t1_t2..."""
    factory = BUILTINS.get(name)
    if factory is not None:
        return factory()
    match = _CHARACTER_NAME.match(name)
    if match:
        q = int(match.group(1))
        twists = [int(t) for t in match.group(2).split("_") if t]
        try:
            return character(q, twists)
        except InvalidParameter:
            raise UnknownFunction(name)
    raise UnknownFunction(name)
