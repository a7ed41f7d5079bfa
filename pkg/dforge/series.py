"""Certified evaluation of F_L(alpha)(z) = sum of alpha(n)(z) L(n)(z).

Tails come from the growth certificate of alpha and the decay certificate of
the kernel: |alpha(n)(z) L(n)(z)| <= C(z) n**(k - c Re z), summed past N by
the integral comparison.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from dforge.arith import ArithFunc, convolve
from dforge.coeffs import to_mp
from dforge.config import get_settings
from dforge.exceptions import (
    BudgetExceeded,
    CertificateMissing,
    CertificateViolation,
    Divergent,
    InvalidParameter,
    NonFinite,
    NotMorphism,
    RecoveryUncertain,
)
from dforge.kernels import Kernel, kernel_mp, kernel_values

logger = logging.getLogger(__name__)

AUDIT_SLACK = 1e-9


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    truncation_N: int
    abscissa_kprime: float
    z: complex = 0j
    value_mp: Optional[object] = None
    certificate: dict = field(default_factory=dict)


def abscissa(k: float, c: float) -> float:
    """k' = max((k + 1) / c, k): absolute convergence on Re z > k'"""
    if c <= 0:
        raise InvalidParameter(f"decay constant c must be positive, got {c}")
    return max((k + 1) / c, k)


def tail_bound(C_growth: float, k: float, decay_C_at_z: float, c: float, x: float, N: int) -> float:
    """C * D * N**(1 - s) / (s - 1) with s = c x - k, a majorant of the tail past N"""
    s = c * x - k
    if s <= 1:
        raise Divergent(f"s = c x - k = {s:.6g} <= 1: Re z = {x} is outside the certified half-plane")
    return C_growth * decay_C_at_z * N ** (1 - s) / (s - 1)


def pairwise_sum(parts: List[complex]) -> complex:
    """Tree reduction; the grouping depends only on len(parts)"""
    if not parts:
        return 0j
    while len(parts) > 1:
        pairs = itertools.zip_longest(parts[::2], parts[1::2], fillvalue=0j)
        parts = [a + b for a, b in pairs]
    return parts[0]


def _require_certificate(alpha: ArithFunc):
    if alpha.certificate is None:
        raise CertificateMissing(f"{alpha.name} has no growth certificate")
    return alpha.certificate


def _check_convergence(alpha: ArithFunc, L: Kernel, z: complex) -> float:
    """Abscissa k' of alpha against L; raises Divergent left of it.

    Kernels with a geometric tail (lambda(n) = n) converge on the whole
    half-plane Re z > 0, to the right of their domain.
    """
    kprime = abscissa(alpha.certificate.k, L.decay_c)
    if L.lam.geometric:
        if z.real <= max(L.domain_k, 0.0):
            raise Divergent(f"Re z = {z.real} <= 0 for the geometric kernel")
    elif z.real <= kprime:
        raise Divergent(f"Re z = {z.real} <= abscissa {kprime:.6g} for {alpha.name}")
    return kprime


def series_tail(alpha: ArithFunc, L: Kernel, z: complex, N: int) -> float:
    """Certified bound on the tail past N; exactly 0 beyond a finite support"""
    cert = _require_certificate(alpha)
    if cert.support is not None and N >= cert.support:
        return 0.0
    C = cert.constant_at(z)
    geometric = L.geometric_tail(C, cert.k, z.real, N)
    if geometric is not None:
        return geometric
    return tail_bound(C, cert.k, L.decay_C(z), L.decay_c, z.real, N)


def _audit(alpha: ArithFunc, coefficients: np.ndarray, z: complex) -> None:
    """Check the declared |alpha(n)(z)| <= C(z) n**k on the audited prefix"""
    cert = alpha.certificate
    horizon = min(len(coefficients) - 1, get_settings().audit_horizon)
    if horizon < 1:
        return
    n = np.arange(1, horizon + 1, dtype=np.float64)
    bound = cert.constant_at(z) * n**cert.k * (1 + AUDIT_SLACK) + AUDIT_SLACK
    over = np.abs(coefficients[1 : horizon + 1]) > bound
    if np.any(over):
        bad = int(np.argmax(over)) + 1
        raise CertificateViolation(
            bad, f"|{alpha.name}({bad})| = {abs(coefficients[bad]):.6g} exceeds {cert.constant_at(z):.6g} * {bad}^{cert.k}"
        )


def _chunk_sums(coefficients: np.ndarray, L: Kernel, z: complex, top: int, threads: int) -> List[complex]:
    chunk = get_settings().chunk_size
    bounds = [(lo, min(lo + chunk, top + 1)) for lo in range(1, top + 1, chunk)]
    kernel = kernel_values(L, top, z)

    def partial(bound):
        lo, hi = bound
        return complex(np.sum(coefficients[lo:hi] * kernel[lo:hi]))

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(partial, bounds))
    return [partial(b) for b in bounds]


def evaluate(
    alpha: ArithFunc,
    L: Kernel,
    z: complex,
    N: int,
    extended: bool = False,
    threads: Optional[int] = None,
) -> SeriesValue:
    """Truncated sum over n <= N with a certified tail bound"""
    if N < 1:
        raise InvalidParameter(f"truncation N must be >= 1, got {N}")
    cert = _require_certificate(alpha)
    z = complex(z)
    kprime = _check_convergence(alpha, L, z)
    tail = series_tail(alpha, L, z, N)
    top = N if cert.support is None else min(N, cert.support)

    coefficients = alpha.values(top, z)
    _audit(alpha, coefficients, z)

    value_mp = None
    if extended:
        with mpmath.workdps(get_settings().extended_dps):
            value_mp = mpmath.fsum(to_mp(alpha(n), z) * kernel_mp(L, n, z) for n in range(1, top + 1))
            value = complex(value_mp)
    else:
        threads = threads or get_settings().threads
        parts = _chunk_sums(coefficients, L, z, top, threads)
        logger.debug("%s: %d chunk sums at z=%s", alpha.name, len(parts), z)
        value = pairwise_sum(parts)
    logger.info("%s at z=%s: N=%d, tail <= %.3g", alpha.name, z, N, tail)
    return SeriesValue(value, tail, N, kprime, z, value_mp, cert.to_dict(z))


def evaluate_to_tolerance(
    alpha: ArithFunc,
    L: Kernel,
    z: complex,
    tol: float,
    extended: bool = False,
    threads: Optional[int] = None,
) -> SeriesValue:
    """Smallest N = N0 * 2**j whose tail bound is <= tol"""
    if tol <= 0:
        raise InvalidParameter(f"tolerance must be positive, got {tol}")
    cert = _require_certificate(alpha)
    settings = get_settings()
    z = complex(z)
    _check_convergence(alpha, L, z)
    cap = settings.budget_cap if L.max_n is None else min(settings.budget_cap, L.max_n)
    N = settings.initial_truncation
    if cert.support is not None:
        N = min(N, cert.support)
    N = min(N, cap)
    while series_tail(alpha, L, z, N) > tol:
        N *= 2
        if N > cap:
            raise BudgetExceeded(f"tolerance {tol:g} at z={z} needs a truncation beyond {cap}")
    logger.info("%s at z=%s: tolerance %g reached at N=%d", alpha.name, z, tol, N)
    return evaluate(alpha, L, z, N, extended=extended, threads=threads)


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    bound: float
    product: SeriesValue
    left: SeriesValue
    right: SeriesValue

    @property
    def within_bound(self) -> bool:
        return self.residual <= self.bound


def homomorphism_residual(alpha: ArithFunc, beta: ArithFunc, L: Kernel, z: complex, tol: float) -> ResidualReport:
    """|F(alpha beta)(z) - F(alpha)(z) F(beta)(z)| against tol (2 + |F(alpha)| + |F(beta)|)"""
    if not L.is_monoid_morphism:
        raise NotMorphism(f"kernel '{L.lam.name}' is not a monoid morphism (witness {L.morphism_witness})")
    left = evaluate_to_tolerance(alpha, L, z, tol)
    right = evaluate_to_tolerance(beta, L, z, tol)
    product = evaluate_to_tolerance(convolve(alpha, beta), L, z, tol)
    residual = abs(product.value - left.value * right.value)
    bound = tol * (2 + abs(left.value) + abs(right.value))
    return ResidualReport(residual, bound, product, left, right)


# --- oracles --------------------------------------------------------------

def series_oracle(alpha: ArithFunc, L: Kernel, N: int) -> Callable[[float], Tuple[object, float]]:
    """x -> (F_L(alpha)(x) truncated at N at the current mpmath precision, tail bound)"""
    cert = _require_certificate(alpha)
    top = N if cert.support is None else min(N, cert.support)
    coefficients = [(n, alpha(n)) for n in range(1, top + 1)]
    coefficients = [(n, a) for n, a in coefficients if a]

    def oracle(x):
        x = mpmath.mpf(x)
        value = mpmath.fsum(to_mp(a) * kernel_mp(L, n, x) for n, a in coefficients)
        return value, series_tail(alpha, L, complex(float(x)), N)

    return oracle


def _call_oracle(G, x) -> Tuple[object, float]:
    result = G(x)
    if isinstance(result, tuple):
        return result[0], float(result[1])
    return result, 0.0


# --- peeling --------------------------------------------------------------

@dataclass(frozen=True)
class PeeledCoefficient:
    n: int
    recovered: complex
    error_majorant: float
    x: float
    rounded: Optional[int] = None
    rounded_im: Optional[int] = None


def _peel_majorant(C: float, k: float, ratio: float, x: float, n0: int) -> float:
    """C * sum over n > n0 of n**(k - ratio x), bounded by its first term plus the integral"""
    s = ratio * x - k
    if s <= 1:
        return math.inf
    first = n0 + 1
    return C * first ** (-s) * (1 + first / (s - 1))


def peel(
    G,
    L: Kernel,
    n_max: int,
    x_schedule: Optional[Sequence[float]] = None,
    growth_cert: Tuple[float, float] = (1.0, 0.0),
    integer_mode: bool = True,
    tol: Optional[float] = None,
) -> List[PeeledCoefficient]:
    """Recover alpha(1..n_max) from values of G = F_L(alpha) at large real x.

    a(n0) = (G(x) - sum over n < n0 of a(n) L(n)(x)) / L(n0)(x), with the rest
    of the series bounded through the ratio certificate C(n0) of the kernel.
    For every n0 the scheduled x with the smallest error bound is used.
    """
    if n_max < 1:
        raise InvalidParameter(f"n_max must be >= 1, got {n_max}")
    schedule = sorted(x_schedule or get_settings().peel_schedule())
    C, k = growth_cert
    C, k = float(C), float(k)
    lam_top = L.lam(n_max)
    digits = {x: int(lam_top * x / math.log(10) + math.log10(max(C, 1.0)) + 30) for x in schedule}
    g_values, kernels = {}, {}
    for x in schedule:
        with mpmath.workdps(digits[x]):
            g_values[x] = _call_oracle(G, x)
            kernels[x] = [None] + [kernel_mp(L, n, x) for n in range(1, n_max + 1)]

    recovered: List[PeeledCoefficient] = []
    # values subtracted from G: Gaussian integers, or estimates kept at full precision
    subtracted = {}
    for n0 in range(1, n_max + 1):
        ratio = L.ratio_C(n0)
        best = None
        for x in schedule:
            with mpmath.workdps(digits[x]):
                g, g_err = g_values[x]
                lk = kernels[x]
                rest = g - mpmath.fsum(v * lk[n] for n, v in subtracted.items() if v != 0)
                estimate = rest / lk[n0]
                lead = abs(lk[n0])
                propagated = 0.0
                if not integer_mode:
                    propagated = float(mpmath.fsum(r.error_majorant * abs(lk[r.n]) / lead for r in recovered))
                total = _peel_majorant(C, k, ratio, x, n0) + propagated + float(g_err / lead)
                if best is None or total < best[0]:
                    best = (total, x, estimate)
        total, x, estimate = best
        rounded = rounded_im = None
        if integer_mode:
            if not total < 0.5:
                raise RecoveryUncertain(n0, total)
            rounded = int(round(float(mpmath.re(estimate))))
            rounded_im = int(round(float(mpmath.im(estimate))))
            subtracted[n0] = mpmath.mpc(rounded, rounded_im)
            value = complex(rounded, rounded_im)
        else:
            if tol is not None and total > tol:
                raise RecoveryUncertain(n0, total)
            subtracted[n0] = estimate
            value = complex(estimate)
        logger.info("peel n=%d: x=%g, majorant %.3g", n0, x, total)
        recovered.append(PeeledCoefficient(n0, value, total, x, rounded, rounded_im))
    return recovered


# --- growth probes --------------------------------------------------------

@dataclass(frozen=True)
class DecayProbeReport:
    """Heuristic estimate of lim log|f(x)| / x on a finite real grid.

    in_I: exponential decay; in_B_not_I: subexponential without decay;
    outside_B: exponential growth. Membership is a limit statement, so the
    verdict is evidence only.
    """
    slope_estimate: float
    samples: List[Tuple[float, float]]
    verdict: str
    tolerance: float


def default_probe_grid() -> np.ndarray:
    settings = get_settings()
    return np.linspace(settings.probe_x_min, settings.probe_x_max, settings.probe_points)


def _log_abs(f, x: float) -> float:
    """log|f(x)|; overflow counts as +inf, NaN is an error"""
    try:
        value = f(x)
        if isinstance(value, tuple):
            value = value[0]
        magnitude = abs(mpmath.mpmathify(value))
    except OverflowError:
        return math.inf
    except ZeroDivisionError:
        raise NonFinite(x)
    if mpmath.isinf(magnitude):
        return math.inf
    if mpmath.isnan(magnitude):
        raise NonFinite(x)
    if magnitude == 0:
        return -math.inf
    return float(mpmath.log(magnitude))


def _slope(xs: np.ndarray, ys: np.ndarray) -> float:
    return float(np.polyfit(xs, ys, 1)[0])


def decay_probe(f, x_grid: Optional[Sequence[float]] = None, tolerance: Optional[float] = None) -> DecayProbeReport:
    """Least-squares slope of log|f(x)| over the top half of the grid.

    The top half is also split into two quarters; quarter slopes that differ
    by more than the tolerance make the verdict inconclusive.
    f should return mpmath numbers: a double-precision f underflows to 0 on the
    default grid, which reads as exact vanishing. Overflow anywhere on the grid
    gives outside_B with an infinite slope.
    """
    xs = np.asarray(default_probe_grid() if x_grid is None else x_grid, dtype=np.float64)
    tol = get_settings().probe_tolerance if tolerance is None else tolerance
    if len(xs) < 8:
        raise InvalidParameter(f"a probe grid needs at least 8 points, got {len(xs)}")
    if np.any(np.diff(xs) <= 0) or xs[0] <= 0:
        raise InvalidParameter("probe grid must be positive and increasing")
    if xs[-1] < 2 * xs[0]:
        raise InvalidParameter("probe grid must span a factor of 2 (max >= 2 min)")

    logs = np.array([_log_abs(f, float(x)) for x in xs])
    samples = [(float(x), float(y)) for x, y in zip(xs, logs)]
    if np.any(np.isposinf(logs)):
        # overflow is evidence of exponential growth
        return DecayProbeReport(math.inf, samples, "outside_B", tol)
    top_x, top_y = xs[len(xs) // 2 :], logs[len(xs) // 2 :]
    finite = np.isfinite(top_y)
    if not np.any(finite):
        # identically zero on the far grid
        return DecayProbeReport(-math.inf, samples, "in_I", tol)
    if np.count_nonzero(finite) < 4:
        return DecayProbeReport(math.nan, samples, "inconclusive", tol)
    top_x, top_y = top_x[finite], top_y[finite]

    slope = _slope(top_x, top_y)
    half = len(top_x) // 2
    early, late = _slope(top_x[:half], top_y[:half]), _slope(top_x[half:], top_y[half:])
    if abs(early - late) > tol:
        verdict = "inconclusive"
    elif slope < -tol:
        verdict = "in_I"
    elif slope > tol:
        verdict = "outside_B"
    else:
        verdict = "in_B_not_I"
    logger.info("probe slope %.6g on [%g, %g]: %s", slope, top_x[0], top_x[-1], verdict)
    return DecayProbeReport(slope, samples, verdict, tol)
