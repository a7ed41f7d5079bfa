"""Turn job definitions into arithmetic functions and kernels."""
from typing import List

from dforge.arith import ArithFunc
from dforge.coeffs import parse_rational
from dforge.exceptions import CertificateMissing
from dforge.functions import builtin, character, table, with_overrides
from dforge.kernels import Kernel, classical_kernel, kernel_from_beta, linear_kernel, table_kernel
from dforge.schemas import (
    BuiltinDefinition,
    CertificateSpec,
    CharacterDefinition,
    ClassicalKernelSpec,
    JobSpec,
    LinearKernelSpec,
    MultiplicativeDefinition,
    PowerKernelSpec,
    TableDefinition,
)


def _with_certificate(func: ArithFunc, spec: CertificateSpec) -> ArithFunc:
    k, C = parse_rational(spec.k), parse_rational(spec.C)
    return func.certified(float(k), float(C), spec.support, note=f"job: C={C}, k={k}")


def build_function(name: str, definition) -> ArithFunc:
    """Function for one entry of `functions`, named after its key"""
    if isinstance(definition, str):
        return builtin(definition).renamed(name)
    if isinstance(definition, BuiltinDefinition):
        func = builtin(definition.name).renamed(name)
    elif isinstance(definition, TableDefinition):
        func = table(definition.values, name=name)
    elif isinstance(definition, CharacterDefinition):
        func = character(definition.modulus, definition.twists).renamed(name)
    elif isinstance(definition, MultiplicativeDefinition):
        overrides = {p: list(values) for p, values in definition.overrides.items()}
        func = with_overrides(builtin(definition.base), overrides, name=name)
    else:
        raise TypeError(f"unsupported definition {definition!r}")
    if definition.certificate is not None:
        func = _with_certificate(func, definition.certificate)
    return func


def get_function(job: JobSpec, name: str) -> ArithFunc:
    """A job function by key, falling back to the built-in of that name"""
    definition = job.functions.get(name)
    if definition is None:
        return builtin(name)
    return build_function(name, definition)


def get_functions(job: JobSpec) -> List[ArithFunc]:
    return [get_function(job, name) for name in job.typed_params.funcs]


def require_certified(func: ArithFunc) -> ArithFunc:
    if func.certificate is None:
        raise CertificateMissing(f"{func.name} has no growth certificate; declare one in its definition")
    return func


def get_kernel(spec) -> Kernel:
    if isinstance(spec, ClassicalKernelSpec):
        return classical_kernel()
    if isinstance(spec, PowerKernelSpec):
        return kernel_from_beta(parse_rational(spec.beta))
    if isinstance(spec, LinearKernelSpec):
        return linear_kernel(spec.c)
    return table_kernel(spec.values, spec.c)


def to_complex_z(value) -> complex:
    """A z parameter: one rational (real z) or a [re, im] pair"""
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(parse_rational(re)), float(parse_rational(im)))
    return complex(float(parse_rational(value)))
