from dataclasses import replace

from dforge.commands import CommandRouter, Outcome, RunContext
from dforge.independence import certify_algebraic_independence, certify_linear_independence, nonequivalence_audit
from dforge.resolve import get_functions
from dforge.schemas import JobSpec, RankResult

router = CommandRouter()


@router.command("rank")
def rank(job: JobSpec, context: RunContext) -> Outcome:
    """
    Exact rank of a coefficient matrix

    - **m**: rows alpha_j^(i) for i <= m (linear independence of the derivatives)
    - **D**: rows of all convolution monomials of total degree <= D
    - **audit**: also check the multiplicativity / non-equivalence hypotheses
    """
    params = job.typed_params
    funcs = get_functions(job)
    if params.D is not None:
        report = certify_algebraic_independence(funcs, params.D, params.N)
    else:
        report = certify_linear_independence(funcs, params.m, params.N)
    if params.audit:
        hypotheses = nonequivalence_audit(funcs, params.horizon_p, params.horizon_j)
        report = replace(report, hypotheses=hypotheses.to_dict())
    return Outcome([RankResult(**report.to_dict())], certified=report.certified)
