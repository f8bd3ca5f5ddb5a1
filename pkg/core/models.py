"""Data models for the qKZB heat-equation toolkit."""

from typing import Any, Dict, List, Optional, Tuple
from datetime import datetime
import hashlib
import json

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator, model_validator
from typing_extensions import Annotated


def to_complex(value: Any) -> complex:
    """Accept complex, real, [re, im] pairs and strings like '0.1-0.2j'."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    if hasattr(value, "real") and hasattr(value, "imag"):
        return complex(value)
    raise ValueError(f"cannot interpret {value!r} as a complex number")


def complex_to_json(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


ComplexNumber = Annotated[
    Any,
    PlainValidator(to_complex),
    PlainSerializer(complex_to_json, return_type=list),
]


class ModularPoint(BaseModel):
    """Modulus tau (and optionally the second modulus p) in the upper half plane."""
    tau: ComplexNumber = Field(..., description="Modulus, Im tau > 0")
    p: Optional[ComplexNumber] = Field(None, description="Second modulus, Im p > 0")

    @model_validator(mode="after")
    def check_half_plane(self):
        if self.tau.imag <= 0:
            raise ValueError("Im tau must be positive")
        if self.p is not None and self.p.imag <= 0:
            raise ValueError("Im p must be positive")
        return self


class TruncationPolicy(BaseModel):
    """Series and product cutoffs."""
    series_terms: Optional[int] = Field(None, ge=1, description="Theta series cutoff J; derived from Im tau when omitted")
    product_terms: int = Field(60, ge=1, description="Cap on the phase-function double product cutoff K")
    target_abs_err: float = Field(1e-12, gt=0, description="Target absolute truncation error")


class HighestWeights(BaseModel):
    """Highest weights Lambda_1..Lambda_n with sum 2m."""
    lambdas: Tuple[float, ...] = Field(..., min_length=1, description="Highest weights")

    @field_validator("lambdas")
    @classmethod
    def check_even_sum(cls, value):
        total = sum(value)
        if abs(total / 2 - round(total / 2)) > 1e-12 or total < -1e-12:
            raise ValueError(f"sum of weights must be a nonnegative even integer, got {total}")
        return tuple(float(x) for x in value)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def m(self) -> int:
        return int(round(sum(self.lambdas) / 2))

    @property
    def is_integer(self) -> bool:
        return all(abs(x - round(x)) < 1e-12 and x >= 0 for x in self.lambdas)

    def reversed(self) -> "HighestWeights":
        return HighestWeights(lambdas=tuple(reversed(self.lambdas)))


class BasisIndex(BaseModel):
    """Multi-index I = (i_1, ..., i_n) labelling e_I."""
    indices: Tuple[int, ...] = Field(..., description="Nonnegative integer components")

    @field_validator("indices")
    @classmethod
    def check_nonnegative(cls, value):
        if any(i < 0 for i in value):
            raise ValueError("basis indices must be nonnegative")
        return value


class QkzbConfig(BaseModel):
    """Data of a qKZB system: marked points, moduli, eta and weights."""
    zs: Tuple[ComplexNumber, ...] = Field(..., description="Marked points z_1..z_n")
    tau: ComplexNumber = Field(..., description="Modulus of the R-matrices in K_j")
    p: ComplexNumber = Field(..., description="Step of the difference equations")
    eta: ComplexNumber = Field(..., description="Deformation parameter")
    weights: HighestWeights

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.zs) != self.weights.n:
            raise ValueError("one marked point per highest weight is required")
        return self

    def shifted(self, j: int, step: complex) -> "QkzbConfig":
        """Config with z_j (0-based) moved by step."""
        zs = list(self.zs)
        zs[j] = zs[j] + step
        return self.model_copy(update={"zs": tuple(zs)})


class IntegrationPath(BaseModel):
    """Path mu = direction * t + offset, t in [-t_max, t_max]."""
    direction: ComplexNumber = Field(..., description="Path direction, 2*eta for the Shapovalov pairing")
    offset: ComplexNumber = Field(0j, description="Offset epsilon")
    t_max: float = Field(..., gt=0, description="Truncation of the real parameter")
    panels: int = Field(8, ge=1, description="Number of Gauss-Legendre panels")
    nodes: int = Field(48, ge=2, description="Nodes per panel")


class ContourPiece(BaseModel):
    """One piece of an integration cycle."""
    kind: str = Field(..., description="'segment', 'arc' or 'loop'")
    start: Optional[ComplexNumber] = Field(None, description="Segment start")
    end: Optional[ComplexNumber] = Field(None, description="Segment end")
    center: Optional[ComplexNumber] = Field(None, description="Arc/loop center")
    radius: Optional[float] = Field(None, description="Arc/loop radius")
    angles: Optional[Tuple[float, float]] = Field(None, description="Arc start/end angle")
    weight: ComplexNumber = Field(1 + 0j, description="Multiplicity of the piece (loops: +1 counterclockwise)")
    nodes: int = Field(32, ge=2, description="Quadrature nodes")


class ContourSpec(BaseModel):
    """Serializable description of an integration cycle."""
    pieces: List[ContourPiece] = Field(default_factory=list)
    tag: str = Field("gamma", description="Description tag")
    orientation: str = Field("continued", description="Side convention for the singular points")


class CheckResult(BaseModel):
    """Outcome of one identity check."""
    name: str = Field(..., description="Check name")
    residual: Optional[float] = Field(None, description="Max-norm residual; None when the check errored")
    tolerance: float = Field(..., description="Tolerance after scaling")
    passed: bool = Field(..., description="residual < tolerance")
    note: Optional[str] = Field(None, description="Error message or convention remark")


class Report(BaseModel):
    """Structured record of a suite run."""
    schema_version: int = Field(1, alias="schema", description="Report schema version")
    suite: str = Field(..., description="Suite name")
    timestamp: datetime = Field(default_factory=datetime.now)
    seed: int = Field(..., description="Seed of the generic draws")
    parameters: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict, description="Branch choices and convention flags")

    model_config = ConfigDict(populate_by_name=True)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json", by_alias=True)
        data["status"] = self.status
        return data

    def fingerprint(self) -> str:
        """Hash of the deterministic payload (timestamp excluded)."""
        data = self.to_json_dict()
        data.pop("timestamp", None)
        return hashlib.md5(json.dumps(data, sort_keys=True).encode()).hexdigest()


class ParameterOverrides(BaseModel):
    """Parameter overrides accepted in a suite config."""
    tau: Optional[ComplexNumber] = None
    p: Optional[ComplexNumber] = None
    eta: Optional[ComplexNumber] = None
    lambdas: Optional[Tuple[float, ...]] = None
    zs: Optional[Tuple[ComplexNumber, ...]] = None
    kappa: Optional[int] = None
    N: Optional[int] = None
    epsilon: Optional[ComplexNumber] = None

    model_config = ConfigDict(extra="forbid")


class QuadratureOverrides(BaseModel):
    """Quadrature overrides accepted in a suite config."""
    quad_nodes: Optional[int] = Field(None, ge=2)
    detour_nodes: Optional[int] = Field(None, ge=2)
    path_nodes: Optional[int] = Field(None, ge=2)
    torus_points: Optional[int] = Field(None, ge=2)
    product_terms: Optional[int] = Field(None, ge=1)
    target_abs_err: Optional[float] = Field(None, gt=0)
    orientation: Optional[str] = None

    model_config = ConfigDict(extra="forbid")


class SuiteConfig(BaseModel):
    """Configuration of a suite run."""
    suite: str = Field(..., description="Suite name")
    parameters: ParameterOverrides = Field(default_factory=ParameterOverrides)
    tolerances: Dict[str, float] = Field(default_factory=dict, description="check-name -> tolerance")
    quadrature: QuadratureOverrides = Field(default_factory=QuadratureOverrides)
    seed: Optional[int] = Field(None, description="Seed for generic draws")

    model_config = ConfigDict(extra="forbid")


class ExpansionReport(BaseModel):
    """Result of the small-eta expansion of the n=1, Lambda=2 heat equation."""
    eta_sequence: List[ComplexNumber] = Field(..., description="Decreasing |eta| values")
    lambdas: List[ComplexNumber] = Field(..., description="Sample points")
    leading_residual: float = Field(..., description="max |g0 - v0| of the extrapolated O(1) term")
    c_values: List[ComplexNumber] = Field(..., description="Fitted c(tau) per sample point")
    c_spread: float = Field(..., description="Spread of the fitted c(tau) across the samples")
    eta_function_value: ComplexNumber = Field(..., description="Comparison value built from the Dedekind eta")

    @field_validator("eta_sequence")
    @classmethod
    def check_sequence(cls, value):
        if len(value) < 3:
            raise ValueError("at least three eta values are needed")
        mags = [abs(v) for v in value]
        if any(b >= a for a, b in zip(mags, mags[1:])):
            raise ValueError("eta sequence must decrease strictly in modulus")
        return value


class ModularElement(BaseModel):
    """Element (a b; c d) of SL(2, Z)."""
    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def check_determinant(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")
        return self

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def automorphy(self, tau: complex) -> complex:
        return self.c * tau + self.d

    def __matmul__(self, other: "ModularElement") -> "ModularElement":
        return ModularElement(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )
