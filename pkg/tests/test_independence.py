from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import QQ_I

from dforge.arith import scale, unity
from dforge.exceptions import InvalidParameter, UnsupportedCoefficients
from dforge.functions import builtin, one, table, with_overrides
from dforge.independence import (
    CERTIFIED,
    NOT_CERTIFIED,
    certify_algebraic_independence,
    certify_linear_independence,
    coefficient_matrix,
    monomial_family,
    nonequivalence_audit,
    rank_exact,
    rank_numeric,
    to_numeric,
)


def test_one_and_mobius_with_first_derivatives():
    report = certify_linear_independence([builtin("one"), builtin("mu")], 1, 64)
    assert report.rank == 4
    assert report.verdict == CERTIFIED
    assert report.certified
    assert report.numeric_rank == 4
    assert report.row_labels == ["one", "one^(1)", "mu", "mu^(1)"]


def test_derivative_rows_pivot_on_the_first_columns():
    report = certify_linear_independence([builtin("one")], 2, 8)
    assert report.rank == 3
    assert report.witness == (1, 2, 3)


def test_proportional_functions_are_not_certified():
    f = builtin("one")
    report = certify_linear_independence([f, scale(3, f)], 0, 10)
    assert report.rank == 1
    assert report.verdict == NOT_CERTIFIED
    assert report.numeric_rank == 1


def test_powers_of_one():
    report = certify_algebraic_independence([builtin("one")], 3, 64)
    assert report.rank == 3
    assert report.certified


def test_unity_is_algebraic():
    report = certify_algebraic_independence([unity()], 2, 16)
    assert report.rank == 1
    assert report.verdict == NOT_CERTIFIED


def test_monomial_order_and_names():
    family = monomial_family([builtin("one"), builtin("mu")], 2)
    assert [f.name for f in family] == ["one", "mu", "one^2", "one*mu", "mu^2"]


def test_one_and_mobius_are_algebraically_independent_to_degree_two():
    report = certify_algebraic_independence([builtin("one"), builtin("mu")], 2, 32)
    assert report.rank == 5
    assert report.certified


def test_matrix_argument_checks():
    with pytest.raises(InvalidParameter):
        coefficient_matrix([builtin("one"), builtin("mu")], 1, 3)
    with pytest.raises(InvalidParameter):
        coefficient_matrix([builtin("one")], -1, 10)
    with pytest.raises(InvalidParameter):
        coefficient_matrix([], 0, 10)
    with pytest.raises(InvalidParameter):
        monomial_family([builtin("one")], 0)


def test_z_dependent_coefficients_are_refused():
    with pytest.raises(UnsupportedCoefficients):
        coefficient_matrix([table([["0", "1"]])], 0, 4)


def test_log_entries_are_exact():
    M = coefficient_matrix([builtin("vonmangoldt")], 1, 16)
    assert M.shape == (2, 16)
    report = rank_exact(M)
    assert report.rank == 2


def test_rank_numeric():
    assert rank_numeric(np.eye(3)) == 3
    u = np.array([1.0, 2.0, 3.0])
    assert rank_numeric(np.outer(u, u)) == 1
    assert rank_numeric(np.zeros((2, 4))) == 0


def test_report_dict():
    report = certify_linear_independence([builtin("one")], 0, 5)
    data = report.to_dict()
    assert data["pivot_columns"] == [1]
    assert data["horizon"] == 5
    assert data["hypotheses"] is None


def test_audit_of_distinct_multiplicative_functions():
    audit = nonequivalence_audit([builtin("one"), builtin("mu")], 100, 5)
    assert audit.holds
    assert audit.to_dict()["equivalent_to_e"] == {"one": False, "mu": False}


def test_audit_flags_a_local_change():
    changed = with_overrides(one(), {2: ["2"]}, name="one_at_2")
    audit = nonequivalence_audit([builtin("one"), changed], 100, 5)
    assert audit.equivalent_pairs == {"one~one_at_2": True}
    assert not audit.holds


def test_audit_flags_non_multiplicative_functions():
    audit = nonequivalence_audit([builtin("vonmangoldt"), builtin("one")], 50, 3)
    assert audit.multiplicative == {"vonmangoldt": False, "one": True}
    assert "vonmangoldt" not in audit.equivalent_to_unity
    assert not audit.holds


@pytest.mark.parametrize("m", [0, 1, 2])
def test_one_and_mobius_derivative_families(m):
    report = certify_linear_independence([builtin("one"), builtin("mu")], m, 64)
    assert report.rank == 2 * (m + 1)
    assert report.numeric_rank == report.rank


def test_one_and_a_character():
    funcs = [builtin("one"), builtin("chi_4_1")]
    assert certify_linear_independence(funcs, 1, 32).rank == 4
    assert certify_algebraic_independence(funcs, 2, 32).rank == 5


def test_to_numeric_substitutes_logarithms():
    M = to_numeric(coefficient_matrix([builtin("vonmangoldt")], 0, 4))
    assert M.shape == (1, 4)
    assert np.allclose(M[0], [0, np.log(2), np.log(3), np.log(2)])


def test_rank_disagreement_is_reported():
    report = certify_linear_independence([builtin("one"), builtin("mu")], 0, 16)
    assert report.to_dict()["ranks_agree"] is True
    assert rank_exact(coefficient_matrix([builtin("one")], 0, 4)).ranks_agree is None
    skewed = replace(report, numeric_rank=1)
    assert skewed.to_dict()["ranks_agree"] is False


@pytest.mark.parametrize("pair", [("one", "mu"), ("one", "lambda_liouville"), ("mu", "lambda_liouville")])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_non_equivalent_pairs_have_independent_derivatives(pair, m):
    report = certify_linear_independence([builtin(name) for name in pair], m, 64)
    assert report.rank == 2 * (m + 1)
    assert report.certified
    assert report.ranks_agree


gaussian_scalars = st.tuples(st.integers(-5, 5), st.integers(-5, 5)).filter(lambda t: t != (0, 0))


@settings(deadline=None, max_examples=25)
@given(st.permutations(range(6)), st.lists(gaussian_scalars, min_size=6, max_size=6))
def test_rank_ignores_row_scaling_and_order(order, scalars):
    M = coefficient_matrix([builtin("one"), scale(2, builtin("one")), builtin("mu")], 1, 24)
    rows = [[entry * M.ring.ground_new(QQ_I(*scalars[i])) for entry in M.rows[i]] for i in order]
    shuffled = replace(M, rows=rows, row_labels=[M.row_labels[i] for i in order])
    assert rank_exact(shuffled).rank == rank_exact(M).rank == 4


def test_rank_grows_with_the_horizon():
    funcs = [builtin("one"), builtin("mu"), builtin("lambda_liouville")]
    ranks = [rank_exact(coefficient_matrix(funcs, 1, N)).rank for N in range(6, 41, 2)]
    assert ranks == sorted(ranks)
    assert ranks[-1] == 6


@pytest.mark.parametrize("funcs", [("one", "mu"), ("mu", "lambda_liouville"), ("one", "chi_4_1")])
def test_derivative_orders_add_up(funcs):
    m = 2
    M = coefficient_matrix([builtin(name) for name in funcs], m, 48)
    blocks = []
    for i in range(m + 1):
        picked = range(i, len(M.rows), m + 1)
        block = replace(M, rows=[M.rows[j] for j in picked], row_labels=[M.row_labels[j] for j in picked])
        blocks.append(rank_exact(block).rank)
    assert sum(blocks) == rank_exact(M).rank == 6
