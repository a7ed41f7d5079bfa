import argparse
import json
import logging
import sys
import time
from typing import List, Optional

from dforge.commands import CommandRouter, RunContext, coefficients, peel, rank, series
from dforge.config import get_settings
from dforge.exceptions import DforgeError, ParseError
from dforge.reports import write_report
from dforge.schemas import COMMANDS, ErrorInfo, JobSpec, RunReport, parse_job

logger = logging.getLogger(__name__)

app = CommandRouter()

# Include routers
app.include_router(series.router)
app.include_router(coefficients.router)
app.include_router(peel.router)
app.include_router(rank.router)


def run(job: JobSpec, context: Optional[RunContext] = None) -> RunReport:
    """Execute one job; errors land in the report instead of propagating"""
    context = context or RunContext()
    started = time.perf_counter()
    report = RunReport(command=job.command, job=job.echo())
    try:
        outcome = app.dispatch(job, context)
    except DforgeError as exc:
        logger.error("%s failed: %s", job.command, exc.detail)
        report.error = ErrorInfo(**exc.to_dict())
        report.exit_code = exc.exit_code
    else:
        report.results = [row.model_dump(mode="json") for row in outcome.results]
        report.audit = outcome.audit
        report.certified = outcome.certified
        report.exit_code = 2 if outcome.certified is False else 0
    if not context.deterministic:
        report.wall_time = time.perf_counter() - started
    return report


def load_job(path: str, command: str) -> JobSpec:
    """Read a job file; the command on the command line fills in or must match the job's"""
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read job file: {exc.strerror}", field="--job")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return parse_job(text)
    if isinstance(data, dict):
        declared = data.setdefault("command", command)
        if declared != command:
            raise ParseError(f"job declares '{declared}' but '{command}' was requested", field="command")
        text = json.dumps(data)
    return parse_job(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dforge",
        description="Certified Dirichlet-series evaluation, coefficient recovery and independence ranks",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--job", required=True, help="JSON job specification")
    parser.add_argument("--out", help="report destination (stdout when omitted)")
    parser.add_argument("--csv", help="also write the result rows as CSV")
    parser.add_argument("--deterministic", action="store_true", help="omit the wall time from the report")
    parser.add_argument("--threads", type=int, help="worker threads for summation")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def configure_logging(verbosity: int) -> None:
    level = get_settings().log_level.upper()
    if verbosity == 1:
        level = "INFO"
    elif verbosity >= 2:
        level = "DEBUG"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.threads is not None and args.threads < 1:
        print("dforge: --threads must be >= 1", file=sys.stderr)
        return 1

    context = RunContext(threads=args.threads, deterministic=args.deterministic)
    out, fmt = args.out, "json"
    try:
        job = load_job(args.job, args.command)
    except DforgeError as exc:
        report = RunReport(command=args.command, error=ErrorInfo(**exc.to_dict()), exit_code=exc.exit_code)
    else:
        report = run(job, context)
        if job.output is not None:
            out = out or job.output.path
            fmt = job.output.format

    text = write_report(report, out, args.csv, fmt, args.deterministic)
    if text is not None:
        sys.stdout.write(text)
    if report.error is not None:
        print(f"dforge: {report.error.type}: {report.error.detail}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
