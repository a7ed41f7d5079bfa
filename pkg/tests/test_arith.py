import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dforge.arith import (
    add,
    agrees,
    convolve,
    derivative,
    dirichlet_inverse,
    divisor_constant,
    equivalent,
    eval_coeff,
    from_prime_powers,
    growth_check,
    is_multiplicative,
    power,
    scale,
    unity,
)
from dforge.coeffs import Z_RING, coeff_equal, constant, log_of, log_symbol, poly
from dforge.exceptions import InvalidParameter, NotInvertible, NotMultiplicative, UnknownFunction, UnsupportedCoefficients
from dforge.functions import builtin, character, mobius, table, with_overrides

small_tables = st.lists(st.integers(-10, 10), min_size=64, max_size=64)
unit_tables = small_tables.filter(lambda values: values[0] != 0)


def same(alpha, beta, horizon):
    return agrees(alpha, beta, horizon) is None


def test_eval_coeff_examples():
    e, one, N = unity(), builtin("one"), builtin("N")
    assert coeff_equal(eval_coeff(e, 1), constant(1))
    assert not eval_coeff(e, 5)
    assert coeff_equal(eval_coeff(one, 7), constant(1))
    assert coeff_equal(eval_coeff(N, 12), constant(12))


def test_eval_coeff_rejects_zero_index():
    with pytest.raises(InvalidParameter):
        eval_coeff(unity(), 0)


def test_add_examples():
    one, mu = builtin("one"), builtin("mu")
    total = add(one, mu)
    assert coeff_equal(total(1), constant(2))
    assert not total(2)
    assert same(add(unity(), builtin("zero")), unity(), 64)


def test_add_growth_exponent_is_the_max():
    total = add(builtin("one"), builtin("N"))
    assert total.certificate.k == 1


@settings(deadline=None)
@given(small_tables)
def test_additive_inverse(values):
    alpha = table(values)
    difference = add(alpha, scale(-1, alpha))
    assert all(not difference(n) for n in range(1, 65))


def test_convolve_examples():
    d = convolve(builtin("one"), builtin("one"))
    assert coeff_equal(d(6), constant(4))


def test_mobius_inversion(mobius_oracle):
    mu = dirichlet_inverse(builtin("one"))
    assert all(coeff_equal(mu(n), constant(mobius_oracle(n))) for n in range(1, 10_001))
    identity = convolve(builtin("mu"), builtin("one"))
    assert same(identity, unity(), 10_000)


def test_from_prime_powers_examples(mobius_oracle):
    assert same(from_prime_powers(lambda p, a: 1), builtin("one"), 200)
    mu = from_prime_powers(lambda p, a: -1 if a == 1 else 0)
    assert all(coeff_equal(mu(n), constant(mobius_oracle(n))) for n in range(1, 10_001))
    assert same(from_prime_powers(lambda p, a: p**a), builtin("N"), 500)


def test_inverse_examples():
    assert same(dirichlet_inverse(unity()), unity(), 64)
    alpha = table(["2", "1", "-1"])
    assert coeff_equal(dirichlet_inverse(alpha)(1), constant("1/2"))


def test_inverse_requires_a_constant_unit():
    with pytest.raises(NotInvertible):
        dirichlet_inverse(table(["0", "1"]))
    with pytest.raises(NotInvertible):
        dirichlet_inverse(table([["0", "1"]]))


def test_derivative_examples():
    alpha = builtin("mu")
    assert derivative(alpha, 0) is alpha
    first = derivative(unity(), 1)
    assert all(not first(n) for n in range(1, 33))
    assert coeff_equal(derivative(builtin("one"), 1)(2), -log_symbol(2))
    assert coeff_equal(derivative(builtin("one"), 2)(6), log_of(6) ** 2)


def test_von_mangoldt_sums_to_log():
    total = convolve(builtin("vonmangoldt"), builtin("one"))
    assert all(coeff_equal(total(n), log_of(n)) for n in range(1, 101))
    assert coeff_equal(builtin("vonmangoldt")(8), log_symbol(2))


def test_is_multiplicative_examples():
    assert is_multiplicative(builtin("mu"), 100).holds
    check = is_multiplicative(add(builtin("one"), unity()), 10)
    assert not check.holds
    assert check.witness == (1,)
    assert not is_multiplicative(builtin("vonmangoldt"), 30).holds


def test_equivalent_examples():
    one, mu = builtin("one"), builtin("mu")
    assert equivalent(one, one, 100, 5).exceptional_primes == ()
    verdict = equivalent(one, mu, 100, 5)
    assert list(verdict.exceptional_primes) == [p for p in range(2, 101) if all(p % q for q in range(2, p))]
    assert verdict.horizon_p == 97
    assert not verdict.supported
    changed = with_overrides(mobius(), {2: ["1"]}, name="mu_prime")
    verdict = equivalent(mu, changed, 100, 5)
    assert verdict.exceptional_primes == (2,)
    assert verdict.supported


def test_equivalent_requires_multiplicative():
    with pytest.raises(NotMultiplicative):
        equivalent(builtin("vonmangoldt"), builtin("one"), 20, 2)


def test_growth_check_examples():
    assert growth_check(builtin("one"), 0, 10_000, (2,)) == 1
    assert growth_check(builtin("d"), 0, 64, (2,)) == 12
    assert growth_check(builtin("N"), 1, 1000, (2,)) == 1


def test_divisor_constant_bounds_the_divisor_count():
    assert growth_check(builtin("d"), 0.25, 10_000) <= divisor_constant(0.25)


def test_power():
    one = builtin("one")
    assert same(power(one, 0), unity(), 16)
    d3 = power(one, 3)
    assert coeff_equal(d3(4), constant(6))
    assert d3.name == "one^3"


def test_characters():
    chi4 = builtin("chi_4_1")
    assert [chi4(n) for n in (1, 2, 3, 5)] == [constant(1), Z_RING.zero, constant(-1), constant(1)]
    chi5 = character(5, [1])
    assert coeff_equal(chi5(2), constant(["0", "1"]))
    assert coeff_equal(chi5(3), constant(["0", "-1"]))
    assert is_multiplicative(chi5, 100).holds
    chi8 = builtin("chi_8_1_0")
    assert coeff_equal(chi8(3), constant(-1))
    assert coeff_equal(chi8(5), constant(1))


def test_character_limits():
    with pytest.raises(UnsupportedCoefficients):
        character(7, [1])
    with pytest.raises(UnknownFunction):
        builtin("chi_101")
    with pytest.raises(UnknownFunction):
        builtin("zeta")


def test_table_support_and_polynomial_entries():
    alpha = table(["1", ["0", "1"]])
    assert alpha.certificate.support == 2
    assert coeff_equal(alpha(2), poly([0, 1]))
    assert not alpha(3)


def test_overrides_need_primes():
    with pytest.raises(InvalidParameter):
        with_overrides(mobius(), {4: ["1"]})


@settings(deadline=None)
@given(small_tables, small_tables, small_tables)
def test_ring_axioms(a, b, c):
    alpha, beta, gamma = table(a), table(b), table(c)
    e = unity()
    assert same(convolve(convolve(alpha, beta), gamma), convolve(alpha, convolve(beta, gamma)), 64)
    assert same(convolve(alpha, beta), convolve(beta, alpha), 64)
    assert same(convolve(alpha, add(beta, gamma)), add(convolve(alpha, beta), convolve(alpha, gamma)), 64)
    assert same(convolve(e, alpha), alpha, 64)
    assert same(convolve(alpha, e), alpha, 64)


@settings(deadline=None)
@given(unit_tables, unit_tables)
def test_no_zero_divisors(a, b):
    assert convolve(table(a), table(b))(1)


@settings(deadline=None, max_examples=20)
@given(unit_tables)
def test_inverse_round_trip(values):
    alpha = table(values)
    assert same(convolve(alpha, dirichlet_inverse(alpha)), unity(), 256)


@settings(deadline=None, max_examples=10)
@given(st.lists(st.integers(-3, 3), min_size=10, max_size=10), st.lists(st.integers(-3, 3), min_size=10, max_size=10))
def test_multiplicative_closure(u, v):
    alpha = from_prime_powers(lambda p, a: u[(p + 3 * a) % 10])
    beta = from_prime_powers(lambda p, a: v[(2 * p + a) % 10])
    assert is_multiplicative(convolve(alpha, beta), 1000).holds


@settings(deadline=None, max_examples=25)
@given(small_tables, small_tables)
def test_derivation_identity(a, b):
    alpha, beta = table(a), table(b)
    left = derivative(convolve(alpha, beta), 1)
    right = add(convolve(derivative(alpha, 1), beta), convolve(alpha, derivative(beta, 1)))
    assert same(left, right, 128)


def test_prime_power_values_skip_factorization():
    f = from_prime_powers(lambda p, a: a + 1)
    assert coeff_equal(f.at_prime_power(1_000_000_007, 3), constant(4))
    assert coeff_equal(f.at_prime_power(5, 0), constant(1))
    t = table([1, 2, 3, 4])
    assert coeff_equal(t.at_prime_power(2, 2), constant(4))
