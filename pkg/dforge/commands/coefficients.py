from typing import List

from dforge.arith import ArithFunc, convolve, derivative, dirichlet_inverse, equivalent
from dforge.coeffs import format_coeff, to_complex
from dforge.commands import CommandRouter, Outcome, RunContext
from dforge.commands.series import evaluate_rows
from dforge.resolve import get_functions, get_kernel
from dforge.schemas import CoefficientRow, EquivResult, JobSpec

router = CommandRouter()


def _coefficient_rows(func: ArithFunc, horizon: int) -> List[CoefficientRow]:
    rows = []
    for n in range(1, horizon + 1):
        value = func(n)
        approx = to_complex(value)
        rows.append(CoefficientRow(function=func.name, n=n, value=format_coeff(value), re=approx.real, im=approx.imag))
    return rows


def _listing(job: JobSpec, func: ArithFunc, context: RunContext) -> Outcome:
    """Exact coefficients of func, or its certified values when z is given"""
    params = job.typed_params
    if params.z is None:
        return Outcome(_coefficient_rows(func, params.horizon))
    kernel = get_kernel(job.kernel)
    rows = evaluate_rows([func], kernel, params.z, tol=params.tol, threads=context.threads)
    return Outcome(rows, audit={"kernel": kernel.audit()})


@router.command("convolve")
def convolve_functions(job: JobSpec, context: RunContext) -> Outcome:
    alpha, beta = get_functions(job)
    return _listing(job, convolve(alpha, beta), context)


@router.command("inverse")
def invert(job: JobSpec, context: RunContext) -> Outcome:
    """Dirichlet inverse; it has no growth certificate, so z is refused"""
    (alpha,) = get_functions(job)
    return _listing(job, dirichlet_inverse(alpha), context)


@router.command("derive")
def derive(job: JobSpec, context: RunContext) -> Outcome:
    (alpha,) = get_functions(job)
    return _listing(job, derivative(alpha, job.typed_params.j), context)


@router.command("equiv")
def equiv(job: JobSpec, context: RunContext) -> Outcome:
    """
    Exceptional primes of two multiplicative functions

    Supported (exit 0) when no exceptional prime lies in the upper half of
    the prime horizon.
    """
    params = job.typed_params
    alpha, beta = get_functions(job)
    verdict = equivalent(alpha, beta, params.horizon_p, params.horizon_j)
    result = EquivResult(
        left=alpha.name,
        right=beta.name,
        exceptional_primes=list(verdict.exceptional_primes),
        horizon_p=params.horizon_p,
        horizon_j=params.horizon_j,
        supported=verdict.supported,
    )
    return Outcome([result], certified=verdict.supported)
