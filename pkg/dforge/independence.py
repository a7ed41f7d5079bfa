"""Linear and degree-bounded algebraic independence through exact coefficient ranks.

Entries of a coefficient matrix live in QQ_I[z, log_2, log_3, ...]: the
symbols log_p are independent over Q, so a rank computed over this ring is the
rank over the field generated by the logarithms of the primes.
"""
import itertools
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.rings import PolyElement, PolyRing

from dforge.arith import ArithFunc, convolve, derivative, equivalent, is_multiplicative, power, unity
from dforge.coeffs import lift, ring_for, to_complex, total_degree, z_degree
from dforge.config import get_settings
from dforge.exceptions import InvalidParameter, UnsupportedCoefficients

logger = logging.getLogger(__name__)

CERTIFIED = "certified_independent"
NOT_CERTIFIED = "not_certified"


@dataclass(frozen=True)
class CoeffMatrix:
    """rows[i][n - 1] is the n-th coefficient of the i-th row function"""
    rows: List[List[PolyElement]]
    row_labels: List[str]
    horizon: int
    ring: PolyRing

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), self.horizon


@dataclass(frozen=True)
class IndependenceReport:
    rank: int
    expected: int
    horizon_N: int
    verdict: str
    witness: Tuple[int, ...]
    row_labels: List[str]
    numeric_rank: Optional[int] = None
    hypotheses: Optional[dict] = None

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    @property
    def ranks_agree(self) -> Optional[bool]:
        """Exact and SVD ranks match; None before the numeric cross-check"""
        if self.numeric_rank is None:
            return None
        return self.numeric_rank == self.rank

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "expected": self.expected,
            "horizon": self.horizon_N,
            "verdict": self.verdict,
            "pivot_columns": list(self.witness),
            "row_labels": list(self.row_labels),
            "numeric_rank": self.numeric_rank,
            "ranks_agree": self.ranks_agree,
            "hypotheses": self.hypotheses,
        }


def coefficient_matrix(funcs: Sequence[ArithFunc], m: int, N: int) -> CoeffMatrix:
    """Rows alpha_j^(i)(1..N) for every function alpha_j and every order i <= m"""
    if m < 0:
        raise InvalidParameter(f"derivative order bound must be >= 0, got {m}")
    if not funcs:
        raise InvalidParameter("at least one function is needed")
    size = len(funcs) * (m + 1)
    if N < size:
        raise InvalidParameter(f"{size} rows need a horizon N >= {size}, got {N}")
    ring = ring_for(N)

    rows, labels = [], []
    for f in funcs:
        for n in range(1, N + 1):
            if z_degree(f(n)):
                raise UnsupportedCoefficients(f"{f.name}({n}) depends on z; only constant coefficients are supported")
        for i in range(m + 1):
            row_func = derivative(f, i)
            rows.append([lift(row_func(n), ring) for n in range(1, N + 1)])
            labels.append(row_func.name)
    return CoeffMatrix(rows, labels, N, ring)


def _pick_pivot(A, free_rows, free_cols):
    """Nonzero entry of least total degree, then leftmost column, then topmost row"""
    best = None
    for c in free_cols:
        for r in free_rows:
            entry = A[r][c]
            if not entry:
                continue
            key = (total_degree(entry), c, r)
            if best is None or key < best:
                best = key
    return best


def rank_exact(M: CoeffMatrix, expected: Optional[int] = None) -> IndependenceReport:
    """Fraction-free (Bareiss) elimination with full pivoting.

    After each step every remaining entry is a minor of the original matrix,
    so the division by the previous pivot is exact.
    """
    expected = len(M.rows) if expected is None else expected
    A = [list(row) for row in M.rows]
    free_rows = list(range(len(A)))
    free_cols = list(range(M.horizon))
    previous = M.ring.one
    pivots = []

    while free_rows and free_cols:
        found = _pick_pivot(A, free_rows, free_cols)
        if found is None:
            break
        _, c, p = found
        pivot = A[p][c]
        free_rows.remove(p)
        free_cols.remove(c)
        pivots.append(c + 1)
        for i in free_rows:
            below = A[i][c]
            row = A[i]
            for j in free_cols:
                row[j] = (pivot * row[j] - below * A[p][j]).exquo(previous)
            row[c] = M.ring.zero
        previous = pivot
        logger.debug("pivot %d at column %d (degree %d)", len(pivots), c + 1, total_degree(pivot))

    rank = len(pivots)
    verdict = CERTIFIED if rank == expected else NOT_CERTIFIED
    logger.info("exact rank %d of %d rows at N=%d", rank, len(A), M.horizon)
    return IndependenceReport(rank, expected, M.horizon, verdict, tuple(sorted(pivots)), list(M.row_labels))


def to_numeric(M: CoeffMatrix) -> np.ndarray:
    """Float matrix with log p replaced by its value"""
    return np.array([[to_complex(entry) for entry in row] for row in M.rows], dtype=np.complex128).reshape(M.shape)


def rank_numeric(matrix: np.ndarray) -> int:
    """Number of singular values above eps * max(shape) * s_max"""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if not s.size or s[0] == 0:
        return 0
    tol = s[0] * max(matrix.shape) * np.finfo(np.float64).eps
    return int(np.count_nonzero(s > tol))


def _exponent_vectors(r: int, D: int):
    """Exponents with total degree 1..D: degree first, then lex with the first coordinate largest"""
    for degree in range(1, D + 1):
        vectors = [v for v in itertools.product(range(degree + 1), repeat=r) if sum(v) == degree]
        yield from sorted(vectors, reverse=True)


def _monomial_name(funcs, vector) -> str:
    parts = [f.name if i == 1 else f"{f.name}^{i}" for f, i in zip(funcs, vector) if i]
    return "*".join(parts)


def monomial_family(funcs: Sequence[ArithFunc], D: int) -> List[ArithFunc]:
    """Convolution monomials alpha_1^i_1 ... alpha_r^i_r with 1 <= i_1 + ... + i_r <= D"""
    if D < 1:
        raise InvalidParameter(f"degree bound must be >= 1, got {D}")
    if not funcs:
        raise InvalidParameter("at least one function is needed")
    family = []
    for vector in _exponent_vectors(len(funcs), D):
        product = None
        for f, i in zip(funcs, vector):
            if not i:
                continue
            term = power(f, i)
            product = term if product is None else convolve(product, term)
        family.append(product.renamed(_monomial_name(funcs, vector)))
    return family


def _cross_check(M: CoeffMatrix, report: IndependenceReport) -> IndependenceReport:
    numeric = rank_numeric(to_numeric(M))
    if numeric != report.rank:
        logger.warning("exact rank %d and numeric rank %d disagree at N=%d", report.rank, numeric, M.horizon)
    return replace(report, numeric_rank=numeric)


def certify_linear_independence(funcs: Sequence[ArithFunc], m: int, N: int) -> IndependenceReport:
    """Full rank of the derivative family witnesses independence of the series F^(i)(alpha_j).

    A rank deficit at this horizon is not a disproof.
    """
    M = coefficient_matrix(funcs, m, N)
    return _cross_check(M, rank_exact(M))


def certify_algebraic_independence(funcs: Sequence[ArithFunc], D: int, N: int) -> IndependenceReport:
    """Full rank of the monomial family rules out polynomial relations of total degree <= D"""
    family = monomial_family(funcs, D)
    M = coefficient_matrix(family, 0, N)
    return _cross_check(M, rank_exact(M))


@dataclass(frozen=True)
class HypothesisAudit:
    multiplicative: Dict[str, bool]
    equivalent_to_unity: Dict[str, bool]
    equivalent_pairs: Dict[str, bool]
    horizon_p: int
    horizon_j: int

    @property
    def holds(self) -> bool:
        return (
            all(self.multiplicative.values())
            and not any(self.equivalent_to_unity.values())
            and not any(self.equivalent_pairs.values())
        )

    def to_dict(self) -> dict:
        return {
            "multiplicative": dict(self.multiplicative),
            "equivalent_to_e": dict(self.equivalent_to_unity),
            "equivalent_pairs": dict(self.equivalent_pairs),
            "horizon_p": self.horizon_p,
            "horizon_j": self.horizon_j,
            "holds": self.holds,
        }


def nonequivalence_audit(funcs: Sequence[ArithFunc], horizon_p: int, horizon_j: int) -> HypothesisAudit:
    """Multiplicative, pairwise non-equivalent and none equivalent to e, on the given horizons.

    Equivalence is read as "no exceptional prime in the upper half of the
    horizon"; functions that fail the multiplicativity check are left out of
    the equivalence tables.
    """
    horizon = get_settings().multiplicative_horizon
    multiplicative = {f.name: is_multiplicative(f, horizon).holds for f in funcs}
    usable = [f for f in funcs if multiplicative[f.name]]
    e = unity()
    to_unity = {f.name: equivalent(f, e, horizon_p, horizon_j).supported for f in usable}
    pairs = {
        f"{f.name}~{g.name}": equivalent(f, g, horizon_p, horizon_j).supported
        for f, g in itertools.combinations(usable, 2)
    }
    logger.info("hypothesis audit on p <= %d, j <= %d: %d functions", horizon_p, horizon_j, len(funcs))
    return HypothesisAudit(multiplicative, to_unity, pairs, horizon_p, horizon_j)
