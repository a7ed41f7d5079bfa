import json
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    StrictInt,
    ValidationError,
    model_validator,
)

from dforge.coeffs import parse_rational
from dforge.exceptions import ParseError
from dforge.functions import builtin

COMMANDS = ("eval", "convolve", "inverse", "derive", "peel", "rank", "equiv", "probe", "residual")
Command = Literal["eval", "convolve", "inverse", "derive", "peel", "rank", "equiv", "probe", "residual"]


def _exact(value) -> str:
    """Normalize an exact rational to its "p/q" form"""
    return str(parse_rational(value))


def _decimal(value) -> str:
    if isinstance(value, float):
        value = repr(value)
    return str(parse_rational(value))


# Exact rationals: ints or "p/q" / decimal strings, never JSON floats
Rational = Annotated[Union[StrictInt, str], AfterValidator(_exact)]
# Real parameters (kernel constants, grids) may also be plain JSON numbers
Real = Annotated[Union[StrictInt, str, float], AfterValidator(_decimal)]
ComplexValue = Union[Rational, Tuple[Rational, Rational]]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_by_name=True, validate_by_alias=True)


# Function Definition Schemas
class CertificateSpec(StrictModel):
    """Declared growth |alpha(n)| <= C n^k, zero beyond an optional support"""
    k: Rational
    C: Rational
    support: Optional[int] = Field(None, ge=1)


class BuiltinDefinition(StrictModel):
    kind: Literal["builtin"]
    name: str
    certificate: Optional[CertificateSpec] = None


class TableDefinition(StrictModel):
    """alpha(n) = values[n - 1]; a list entry is a polynomial in z, lowest degree first"""
    kind: Literal["table"]
    values: List[Union[Rational, List[Rational]]] = Field(..., min_length=1)
    certificate: Optional[CertificateSpec] = None


class CharacterDefinition(StrictModel):
    kind: Literal["character"]
    modulus: int = Field(..., ge=1, le=100)
    twists: List[int] = Field(default_factory=list)
    certificate: Optional[CertificateSpec] = None


class MultiplicativeDefinition(StrictModel):
    """Multiplicative function equal to `base` except at the listed prime powers"""
    kind: Literal["multiplicative"]
    base: str = "one"
    overrides: Dict[int, List[ComplexValue]] = Field(default_factory=dict)
    certificate: Optional[CertificateSpec] = None


FunctionDefinition = Union[
    str,
    Annotated[
        Union[BuiltinDefinition, TableDefinition, CharacterDefinition, MultiplicativeDefinition],
        Field(discriminator="kind"),
    ],
]


# Kernel Schemas
class ClassicalKernelSpec(StrictModel):
    kind: Literal["classical"] = "classical"


class PowerKernelSpec(StrictModel):
    """lambda(n) = beta log n"""
    kind: Literal["power"]
    beta: Real


class LinearKernelSpec(StrictModel):
    """lambda(n) = n"""
    kind: Literal["linear"]
    c: Real = "1"


class TableKernelSpec(StrictModel):
    kind: Literal["table"]
    values: List[Real] = Field(..., alias="lambda", min_length=1)
    c: Real


KernelSpec = Annotated[
    Union[ClassicalKernelSpec, PowerKernelSpec, LinearKernelSpec, TableKernelSpec],
    Field(discriminator="kind"),
]


# Command Parameter Schemas
class FunctionParams(StrictModel):
    """`funcs` names entries of `functions` or built-ins; omitted means every defined function"""
    funcs: Optional[List[str]] = None


class EvalParams(FunctionParams):
    z: List[ComplexValue] = Field(..., min_length=1)
    N: Optional[int] = Field(None, ge=1, description="Fixed truncation; otherwise tol picks it")
    tol: Optional[Rational] = None
    extended: bool = False

    @model_validator(mode="after")
    def truncation_or_tolerance(self):
        if self.N is not None and self.tol is not None:
            raise ValueError("Provide either N or tol, not both")
        if self.N is None and self.tol is None:
            self.tol = "1/1000000"
        return self


class CoefficientParams(FunctionParams):
    """List exact coefficients up to `horizon`, or evaluate the result at `z`"""
    horizon: int = Field(16, ge=1, le=100000)
    z: Optional[List[ComplexValue]] = Field(None, min_length=1)
    tol: Rational = "1/1000000"


class DeriveParams(CoefficientParams):
    j: int = Field(1, ge=0)


class EquivParams(FunctionParams):
    horizon_p: int = Field(..., ge=2, alias="P")
    horizon_j: int = Field(..., ge=1, alias="J")


class PeelParams(FunctionParams):
    n_max: int = Field(..., ge=1, le=256)
    x_schedule: Optional[List[Real]] = Field(None, min_length=1)
    oracle_N: int = Field(64, ge=1, description="Truncation of the forward evaluation used as oracle")
    integer_mode: bool = True
    tol: Optional[Rational] = None


class RankParams(FunctionParams):
    N: int = Field(..., ge=1)
    m: int = Field(0, ge=0, description="Derivative order bound (linear independence)")
    D: Optional[int] = Field(None, ge=1, description="Total degree bound (algebraic independence)")
    audit: bool = False
    horizon_p: int = Field(100, ge=2, alias="P")
    horizon_j: int = Field(5, ge=1, alias="J")

    @model_validator(mode="after")
    def one_family(self):
        if self.D is not None and self.m:
            raise ValueError("Provide either m (derivatives) or D (monomials), not both")
        return self


class ProbeParams(FunctionParams):
    x_grid: Optional[List[Real]] = Field(None, min_length=8)
    tolerance: Optional[Real] = None
    oracle_N: int = Field(64, ge=1)


class ResidualParams(FunctionParams):
    z: ComplexValue
    tol: Rational = "1/100000000"


PARAMS_BY_COMMAND = {
    "eval": EvalParams,
    "convolve": CoefficientParams,
    "inverse": CoefficientParams,
    "derive": DeriveParams,
    "peel": PeelParams,
    "rank": RankParams,
    "equiv": EquivParams,
    "probe": ProbeParams,
    "residual": ResidualParams,
}

# Number of functions a command takes; absent means any positive number
FUNCTION_ARITY = {
    "convolve": 2,
    "inverse": 1,
    "derive": 1,
    "peel": 1,
    "equiv": 2,
    "probe": 1,
    "residual": 2,
}


class OutputSpec(StrictModel):
    path: Optional[str] = None
    format: Literal["json", "csv"] = "json"


class JobSpec(StrictModel):
    command: Command
    functions: Dict[str, FunctionDefinition] = Field(default_factory=dict)
    kernel: KernelSpec = Field(default_factory=ClassicalKernelSpec)
    params: Dict[str, Any] = Field(default_factory=dict)
    output: Optional[OutputSpec] = None

    @model_validator(mode="after")
    def params_match_command(self):
        self.resolved_params()
        return self

    def resolved_params(self) -> FunctionParams:
        """Params validated against the command, with `funcs` resolved"""
        try:
            params = PARAMS_BY_COMMAND[self.command].model_validate(self.params)
        except ValidationError as exc:
            first = exc.errors()[0]
            raise ParseError(first["msg"], field=_field(("params",) + tuple(first["loc"])))
        names = params.funcs or list(self.functions)
        if not names:
            raise ValueError("No functions given: define `functions` or list `params.funcs`")
        arity = FUNCTION_ARITY.get(self.command)
        if arity is not None and len(names) != arity:
            raise ValueError(f"'{self.command}' takes {arity} function(s), got {len(names)}")
        for name, definition in self.functions.items():
            if isinstance(definition, str):
                builtin(definition)
            elif isinstance(definition, BuiltinDefinition):
                builtin(definition.name)
            elif isinstance(definition, MultiplicativeDefinition):
                builtin(definition.base)
        for name in names:
            if name not in self.functions:
                builtin(name)
        return params.model_copy(update={"funcs": names})

    @property
    def typed_params(self) -> FunctionParams:
        return self.resolved_params()

    def echo(self) -> dict:
        """The job as submitted, normalized; parses back to an equal job"""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


def _field(loc) -> str:
    return ".".join(str(part) for part in loc) or None


def parse_job(text: str) -> JobSpec:
    """Parse and validate a JSON job; every failure becomes a ParseError"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise ParseError("a job must be a JSON object")
    try:
        return JobSpec.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ParseError(first["msg"], field=_field(first["loc"]))


# Result Schemas
class EvalRow(BaseModel):
    function: str
    n_truncation: int
    re_z: float
    im_z: float
    re_value: float
    im_value: float
    tail_bound: float
    abscissa: float
    value_mp: Optional[str] = None
    certificate: Dict[str, Any] = Field(default_factory=dict)


class CoefficientRow(BaseModel):
    function: str
    n: int
    value: str = Field(..., description="Exact coefficient; log p appears as the symbol log_p")
    re: float
    im: float


class PeelRow(BaseModel):
    n: int
    recovered_re: float
    recovered_im: float
    error_majorant: float
    rounded_integer: Optional[int] = None
    rounded_im: Optional[int] = None
    x: float
    exact: str


class EquivResult(BaseModel):
    left: str
    right: str
    exceptional_primes: List[int]
    horizon_p: int
    horizon_j: int
    supported: bool


class ResidualResult(BaseModel):
    left: str
    right: str
    re_z: float
    im_z: float
    residual: float
    bound: float
    within_bound: bool
    product_value: Tuple[float, float]
    left_value: Tuple[float, float]
    right_value: Tuple[float, float]


class ProbeResult(BaseModel):
    function: str
    slope_estimate: Optional[float] = None
    verdict: str
    tolerance: float
    samples: List[Tuple[float, Optional[float]]]


class RankResult(BaseModel):
    rank: int
    expected: int
    horizon: int
    verdict: str
    pivot_columns: List[int]
    row_labels: List[str]
    numeric_rank: Optional[int] = None
    ranks_agree: Optional[bool] = None
    hypotheses: Optional[Dict[str, Any]] = None


class ErrorInfo(BaseModel):
    type: str
    detail: str


class RunReport(BaseModel):
    """Job echo, results and the certificate audit trail of one run"""
    command: str
    job: Dict[str, Any] = Field(default_factory=dict)
    results: List[Dict[str, Any]] = Field(default_factory=list)
    audit: Dict[str, Any] = Field(default_factory=dict)
    certified: Optional[bool] = None
    exit_code: int = 0
    error: Optional[ErrorInfo] = None
    wall_time: Optional[float] = None
