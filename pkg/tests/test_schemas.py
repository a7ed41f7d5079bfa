import json

import pytest

from dforge.coeffs import coeff_equal, constant
from dforge.exceptions import ParseError, UnknownFunction
from dforge.resolve import get_functions, get_kernel, to_complex_z
from dforge.schemas import EvalParams, LinearKernelSpec, PowerKernelSpec, TableKernelSpec, parse_job


def job_text(**fields) -> str:
    return json.dumps(fields)


def test_minimal_eval_job():
    job = parse_job(job_text(command="eval", functions={"zeta": "one"}, params={"z": [2]}))
    params = job.typed_params
    assert isinstance(params, EvalParams)
    assert params.funcs == ["zeta"]
    assert params.tol == "1/1000000"
    assert job.kernel.kind == "classical"


def test_builtin_names_need_no_definition():
    job = parse_job(job_text(command="convolve", params={"funcs": ["one", "mu"]}))
    assert [f.name for f in get_functions(job)] == ["one", "mu"]


def test_truncation_and_tolerance_are_exclusive():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="eval", functions={"f": "one"}, params={"z": [2], "N": 10, "tol": "1/10"}))
    assert info.value.field == "params"
    assert "either N or tol" in info.value.detail


def test_unknown_function():
    with pytest.raises(UnknownFunction) as info:
        parse_job(job_text(command="eval", params={"funcs": ["zeta"], "z": [2]}))
    assert info.value.field == "functions"


def test_unknown_multiplicative_base():
    functions = {"f": {"kind": "multiplicative", "base": "nope", "overrides": {"2": ["1"]}}}
    with pytest.raises(UnknownFunction):
        parse_job(job_text(command="inverse", functions=functions))


@pytest.mark.parametrize("text", ["{", "[1, 2]", "\"eval\""])
def test_malformed_json(text):
    with pytest.raises(ParseError):
        parse_job(text)


def test_syntax_error_position():
    with pytest.raises(ParseError) as info:
        parse_job('{"command": }')
    assert info.value.detail.startswith("line 1, column")


def test_arity():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="convolve", params={"funcs": ["one"]}))
    assert "takes 2" in info.value.detail


def test_no_functions_at_all():
    with pytest.raises(ParseError):
        parse_job(job_text(command="rank", params={"N": 10}))


def test_floats_are_not_exact_rationals():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="eval", functions={"f": "one"}, params={"z": [0.5]}))
    assert info.value.field.startswith("params.z")


def test_unknown_fields_are_rejected():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="eval", functions={"f": "one"}, params={"z": [2]}, bogus=1))
    assert info.value.field == "bogus"


def test_unknown_command():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="fly", functions={"f": "one"}))
    assert info.value.field == "command"


def test_character_modulus_range():
    with pytest.raises(ParseError) as info:
        parse_job(job_text(command="inverse", functions={"chi": {"kind": "character", "modulus": 101}}))
    assert info.value.field.startswith("functions")


def test_rank_families_are_exclusive():
    with pytest.raises(ParseError):
        parse_job(job_text(command="rank", functions={"f": "one"}, params={"N": 10, "m": 1, "D": 2}))


def test_equivalence_horizon_aliases():
    short = parse_job(job_text(command="equiv", params={"funcs": ["one", "mu"], "P": 50, "J": 3}))
    long = parse_job(job_text(command="equiv", params={"funcs": ["one", "mu"], "horizon_p": 50, "horizon_j": 3}))
    assert short.typed_params.horizon_p == long.typed_params.horizon_p == 50


def test_kernel_specs():
    job = parse_job(
        job_text(command="eval", functions={"f": "one"}, kernel={"kind": "power", "beta": 0.5}, params={"z": [3]})
    )
    assert isinstance(job.kernel, PowerKernelSpec)
    assert job.kernel.beta == "1/2"
    assert get_kernel(job.kernel).decay_c == 0.5

    job = parse_job(job_text(command="eval", functions={"f": "one"}, kernel={"kind": "linear"}, params={"z": [1]}))
    assert isinstance(job.kernel, LinearKernelSpec)
    assert not get_kernel(job.kernel).is_monoid_morphism

    kernel = {"kind": "table", "lambda": ["0", "1", "2", "3"], "c": 1}
    job = parse_job(job_text(command="eval", functions={"f": "e"}, kernel=kernel, params={"z": [1], "N": 4}))
    assert isinstance(job.kernel, TableKernelSpec)
    assert get_kernel(job.kernel).max_n == 4
    assert job.echo()["kernel"]["lambda"] == ["0", "1", "2", "3"]


def test_echo_parses_back():
    functions = {
        "t": {"kind": "table", "values": ["1", "1/2", ["0", "1"]], "certificate": {"k": 0, "C": "2", "support": 3}},
        "m": {"kind": "multiplicative", "base": "mu", "overrides": {"2": ["1", ["0", "1"]]}},
        "chi": {"kind": "character", "modulus": 5, "twists": [1]},
        "z": "one",
    }
    job = parse_job(job_text(command="rank", functions=functions, params={"N": 20}))
    assert parse_job(json.dumps(job.echo())) == job


def test_definitions_build_functions():
    functions = {
        "t": {"kind": "table", "values": ["1", "-1/2"], "certificate": {"k": 0, "C": "1", "support": 2}},
        "m": {"kind": "multiplicative", "base": "mu", "overrides": {"3": ["2"]}},
        "chi": {"kind": "character", "modulus": 4, "twists": [1]},
        "b": {"kind": "builtin", "name": "N"},
    }
    job = parse_job(job_text(command="rank", functions=functions, params={"N": 20}))
    t, m, chi, b = get_functions(job)
    assert coeff_equal(t(2), constant("-1/2"))
    assert t.certificate.support == 2
    assert coeff_equal(m(3), constant(2))
    assert coeff_equal(m(6), constant(-2))
    assert coeff_equal(chi(3), constant(-1))
    assert b.name == "b"
    assert coeff_equal(b(7), constant(7))


def test_z_parameters():
    assert to_complex_z("1/2") == 0.5
    assert to_complex_z(["2", "-3"]) == 2 - 3j
