"""Factorization with a configurable horizon and numpy sieve tables.

Tables are float/complex arrays of length N + 1 indexed by n; slot 0 is unused
and kept at zero.
"""
import math
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from sympy import divisors as _sympy_divisors
from sympy import factorint, primerange

from dforge.config import get_settings
from dforge.exceptions import FactorizationOverflow, InvalidParameter

Factorization = Tuple[Tuple[int, int], ...]


def _check_horizon(n: int) -> None:
    if n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n}")
    limit = get_settings().factor_limit
    if n > limit:
        raise FactorizationOverflow(n, limit)


@lru_cache(maxsize=1 << 16)
def _factor(n: int) -> Factorization:
    return tuple(sorted(factorint(n).items()))


def factorize(n: int) -> Factorization:
    """Prime factorization as sorted (p, a) pairs; () for n = 1"""
    _check_horizon(n)
    return _factor(n)


@lru_cache(maxsize=1 << 14)
def _divisors(n: int) -> Tuple[int, ...]:
    return tuple(_sympy_divisors(n))


def divisors(n: int) -> Tuple[int, ...]:
    """Sorted divisors of n"""
    _check_horizon(n)
    return _divisors(n)


def primes_up_to(bound: int) -> List[int]:
    return list(primerange(2, bound + 1))


def prime_powers(p: int, bound: int) -> List[int]:
    """p, p^2, ... up to bound"""
    out = []
    q = p
    while q <= bound:
        out.append(q)
        q *= p
    return out


# --- sieves ---------------------------------------------------------------

def prime_sieve(nmax: int) -> np.ndarray:
    """Eratosthenes sieve: array of primes <= nmax"""
    if nmax < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(nmax + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(nmax) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def multiplicative_table(nmax: int, rule: Callable[[int, int], complex]) -> np.ndarray:
    """Values of the multiplicative function with f(p^a) = rule(p, a) for n <= nmax.

    Every prime multiplies its factor into all of its multiples at once; for
    p > sqrt(nmax) only the exponent a = 1 occurs.
    """
    table = np.zeros(nmax + 1, dtype=np.complex128)
    if nmax < 1:
        return table
    table[1:] = 1.0
    root = math.isqrt(nmax)
    for p in prime_sieve(nmax).tolist():
        if p > root:
            table[p::p] *= rule(p, 1)
            continue
        # factor[k - 1] is rule(p, v_p(k p)) for the multiple k p
        factor = np.full(nmax // p, rule(p, 1), dtype=np.complex128)
        a, q = 2, p
        while q * p <= nmax:
            factor[q - 1 :: q] = rule(p, a)
            a += 1
            q *= p
        table[p::p] *= factor
    return table


def mangoldt_table(nmax: int) -> np.ndarray:
    """Lambda(n) = log p at prime powers p^a, zero elsewhere"""
    table = np.zeros(nmax + 1, dtype=np.float64)
    for p in prime_sieve(nmax).tolist():
        log_p = math.log(p)
        for q in prime_powers(p, nmax):
            table[q] = log_p
    return table


def log_table(nmax: int) -> np.ndarray:
    table = np.zeros(nmax + 1, dtype=np.float64)
    table[1:] = np.log(np.arange(1, nmax + 1, dtype=np.float64))
    return table


def convolve_tables(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dirichlet convolution of two tables of the same length.

    Hyperbola split: pairs (i, j) with i <= sqrt(N) are added row by row, the
    remaining pairs have j <= sqrt(N) and are added column by column.
    """
    nmax = len(a) - 1
    out = np.zeros(nmax + 1, dtype=np.result_type(a, b, np.complex128))
    if nmax < 1:
        return out
    root = math.isqrt(nmax)
    for i in range(1, root + 1):
        if a[i]:
            out[i::i] += a[i] * b[1 : nmax // i + 1]
    for j in range(1, root + 1):
        top = nmax // j
        if top <= root or not b[j]:
            continue
        out[j * (root + 1) : j * top + 1 : j] += a[root + 1 : top + 1] * b[j]
    return out


def inverse_table(a: np.ndarray) -> np.ndarray:
    """Dirichlet inverse by ascending accumulation over d; a[1] must be nonzero"""
    nmax = len(a) - 1
    inv = np.zeros(nmax + 1, dtype=np.complex128)
    if nmax < 1:
        return inv
    acc = np.zeros(nmax + 1, dtype=np.complex128)
    unit = 1.0 / a[1]
    inv[1] = unit
    for d in range(1, nmax // 2 + 1):
        if d > 1:
            inv[d] = -unit * acc[d]
        if inv[d]:
            acc[2 * d :: d] += inv[d] * a[2 : nmax // d + 1]
    tail = max(2, nmax // 2 + 1)
    inv[tail:] = -unit * acc[tail:]
    return inv
