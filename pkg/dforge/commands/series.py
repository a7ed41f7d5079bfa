import math

import mpmath

from dforge.coeffs import parse_rational
from dforge.commands import CommandRouter, Outcome, RunContext
from dforge.config import get_settings
from dforge.resolve import get_functions, get_kernel, require_certified, to_complex_z
from dforge.schemas import EvalRow, JobSpec, ProbeResult, ResidualResult
from dforge.series import SeriesValue, decay_probe, evaluate, evaluate_to_tolerance, homomorphism_residual, series_oracle

router = CommandRouter()


def eval_row(name: str, value: SeriesValue) -> EvalRow:
    value_mp = None
    if value.value_mp is not None:
        value_mp = mpmath.nstr(value.value_mp, get_settings().extended_dps)
    return EvalRow(
        function=name,
        n_truncation=value.truncation_N,
        re_z=value.z.real,
        im_z=value.z.imag,
        re_value=value.value.real,
        im_value=value.value.imag,
        tail_bound=value.tail_bound,
        abscissa=value.abscissa_kprime,
        value_mp=value_mp,
        certificate=value.certificate,
    )


def evaluate_rows(funcs, kernel, z_values, N=None, tol=None, extended=False, threads=None):
    """Certified values of every function at every z, by fixed N or by tolerance"""
    for func in funcs:
        require_certified(func)
    rows = []
    for func in funcs:
        for z in z_values:
            z = to_complex_z(z)
            if N is not None:
                value = evaluate(func, kernel, z, N, extended=extended, threads=threads)
            else:
                value = evaluate_to_tolerance(
                    func, kernel, z, float(parse_rational(tol)), extended=extended, threads=threads
                )
            rows.append(eval_row(func.name, value))
    return rows


@router.command("eval")
def eval_series(job: JobSpec, context: RunContext) -> Outcome:
    """
    Evaluate F_L(alpha) at every z

    - **N**: fixed truncation, or
    - **tol**: smallest doubling of the initial truncation whose tail bound is <= tol
    - **extended**: sum the terms in mpmath at the configured precision
    """
    params = job.typed_params
    kernel = get_kernel(job.kernel)
    rows = evaluate_rows(
        get_functions(job), kernel, params.z, params.N, params.tol, params.extended, context.threads
    )
    return Outcome(rows, audit={"kernel": kernel.audit()})


@router.command("residual")
def residual(job: JobSpec, context: RunContext) -> Outcome:
    """|F(alpha beta)(z) - F(alpha)(z) F(beta)(z)| against its certified bound"""
    params = job.typed_params
    kernel = get_kernel(job.kernel)
    alpha, beta = (require_certified(f) for f in get_functions(job))
    z = to_complex_z(params.z)
    report = homomorphism_residual(alpha, beta, kernel, z, float(parse_rational(params.tol)))
    result = ResidualResult(
        left=alpha.name,
        right=beta.name,
        re_z=z.real,
        im_z=z.imag,
        residual=report.residual,
        bound=report.bound,
        within_bound=report.within_bound,
        product_value=(report.product.value.real, report.product.value.imag),
        left_value=(report.left.value.real, report.left.value.imag),
        right_value=(report.right.value.real, report.right.value.imag),
    )
    audit = {
        "kernel": kernel.audit(),
        "truncations": {
            "left": report.left.truncation_N,
            "right": report.right.truncation_N,
            "product": report.product.truncation_N,
        },
    }
    return Outcome([result], audit=audit, certified=report.within_bound)


def _finite(value: float):
    return value if math.isfinite(value) else None


@router.command("probe")
def probe(job: JobSpec, context: RunContext) -> Outcome:
    """Heuristic decay class of x -> F_L(alpha)(x) on a real grid"""
    params = job.typed_params
    kernel = get_kernel(job.kernel)
    (func,) = get_functions(job)
    require_certified(func)
    grid = None if params.x_grid is None else [float(parse_rational(x)) for x in params.x_grid]
    tolerance = None if params.tolerance is None else float(parse_rational(params.tolerance))
    report = decay_probe(series_oracle(func, kernel, params.oracle_N), grid, tolerance)
    result = ProbeResult(
        function=func.name,
        slope_estimate=_finite(report.slope_estimate),
        verdict=report.verdict,
        tolerance=report.tolerance,
        samples=[(x, _finite(y)) for x, y in report.samples],
    )
    return Outcome([result], audit={"kernel": kernel.audit()}, certified=report.verdict != "inconclusive")
