from dforge.coeffs import format_coeff, parse_rational, to_complex
from dforge.commands import CommandRouter, Outcome, RunContext
from dforge.exceptions import RecoveryUncertain
from dforge.resolve import get_functions, get_kernel, require_certified
from dforge.schemas import JobSpec, PeelRow
from dforge.series import peel, series_oracle

router = CommandRouter()


@router.command("peel")
def peel_coefficients(job: JobSpec, context: RunContext) -> Outcome:
    """
    Recover alpha(1..n_max) from the forward-evaluated series F_L(alpha)

    Certified when every recovered coefficient matches the exact one. A
    coefficient whose error majorant is too large ends the run with a
    negative verdict instead of an error.
    """
    params = job.typed_params
    kernel = get_kernel(job.kernel)
    (alpha,) = get_functions(job)
    cert = require_certified(alpha).certificate
    schedule = None if params.x_schedule is None else [float(parse_rational(x)) for x in params.x_schedule]
    tol = None if params.tol is None else float(parse_rational(params.tol))
    audit = {"kernel": kernel.audit(), "growth": cert.to_dict(0j), "oracle_N": params.oracle_N}
    try:
        recovered = peel(
            series_oracle(alpha, kernel, params.oracle_N),
            kernel,
            params.n_max,
            x_schedule=schedule,
            growth_cert=(cert.constant_at(0j), cert.k),
            integer_mode=params.integer_mode,
            tol=tol,
        )
    except RecoveryUncertain as exc:
        audit["uncertain"] = {"n": exc.n0, "error_majorant": exc.majorant}
        return Outcome([], audit=audit, certified=False)

    rows, matches = [], True
    for item in recovered:
        exact = alpha(item.n)
        if params.integer_mode:
            matches = matches and to_complex(exact) == item.recovered
        else:
            matches = matches and abs(to_complex(exact) - item.recovered) <= item.error_majorant
        rows.append(
            PeelRow(
                n=item.n,
                recovered_re=item.recovered.real,
                recovered_im=item.recovered.imag,
                error_majorant=item.error_majorant,
                rounded_integer=item.rounded,
                rounded_im=item.rounded_im,
                x=item.x,
                exact=format_coeff(exact),
            )
        )
    return Outcome(rows, audit=audit, certified=matches)
