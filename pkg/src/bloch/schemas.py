"""
This module contains the Pydantic models used for the Bloch representation of
qubit states, observables and POVMs, together with the JSON document models
used to read and write them.

Every operator in this toolkit lives in the real span of {I, sigma}; an
operator is stored as the pair (r_coef, x) standing for r_coef*I + x.sigma.

Models:
- BlochVector: A real three-vector (directions, polarizations, POVM coefficient vectors).
- QubitState: A density operator given by its polarization vector.
- ObservablePair: The two measured directions n_A, n_B and the angle between them.
- BlochOperator: A Hermitian operator r_coef*I + x.sigma with no further constraint.
- PovmElement: A positive operator bounded by the identity.
- JointPovm: The four elements E(i, j) of a simultaneous measurement.
- PovmElementRecord / JointPovmDocument: The JSON file schema of a joint POVM.
- PovmRequest / ProbabilityRequest / ProbabilityReport: HTTP request and response bodies.

Invariant violations are raised as pydantic errors of type "constraint"; parsers
turn them into `ConstraintViolation`, every other validation failure is
`MalformedInput`.
"""

import math
from contextlib import contextmanager
from functools import cached_property
from typing import Any, Iterator, Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    ValidationError,
    computed_field,
    field_validator,
    model_serializer,
    model_validator,
)
from pydantic_core import PydanticCustomError

from src.config import Config
from src.errors import ConstraintViolation, MalformedInput, QTradeoffException

Outcome = Literal["+", "-"]
OutcomePair = Literal["++", "+-", "-+", "--"]
Observable = Literal["A", "B"]

OUTCOMES: tuple[Outcome, Outcome] = ("+", "-")
OUTCOME_PAIRS: tuple[OutcomePair, ...] = ("++", "+-", "-+", "--")
SIGN: dict[str, int] = {"+": 1, "-": -1}


def outcome_key(i: Outcome, j: Outcome) -> OutcomePair:
    return f"{i}{j}"  # type: ignore[return-value]


def constraint_error(constraint: str, detail: str) -> PydanticCustomError:
    """Build the pydantic error raised by validators when an invariant fails."""

    return PydanticCustomError(
        "constraint",
        "{constraint}: {detail}",
        {"constraint": constraint, "detail": detail},
    )


def translate_validation_error(exc: ValidationError) -> QTradeoffException:
    """Map a pydantic ValidationError onto the toolkit's exceptions."""

    for error in exc.errors():
        if error["type"] == "constraint":
            ctx = error.get("ctx", {})
            return ConstraintViolation(
                ctx.get("constraint", "constraint"), detail=error["msg"]
            )

    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "input"

    return MalformedInput(f"{location}: {first['msg']}")


@contextmanager
def constraint_guard() -> Iterator[None]:
    """Re-raise pydantic validation failures as toolkit exceptions."""

    try:
        yield
    except ValidationError as exc:
        raise translate_validation_error(exc) from exc


class BlochVector(BaseModel):
    """
    A real three-vector.

    Serialized as a JSON array [x, y, z]; also accepts a mapping with keys x, y, z.

    Attributes:
        x (float): First component.
        y (float): Second component.
        z (float): Third component.
    """

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    z: float

    @model_validator(mode="before")
    @classmethod
    def _from_sequence(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple, np.ndarray)):
            if len(data) != 3:
                raise ValueError("a Bloch vector needs exactly three components")
            return {"x": data[0], "y": data[1], "z": data[2]}
        return data

    @field_validator("x", "y", "z")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise constraint_error("finite components", f"component {value!r}")
        return float(value)

    @model_serializer
    def _as_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @classmethod
    def zero(cls) -> "BlochVector":
        return cls(x=0.0, y=0.0, z=0.0)

    @classmethod
    def from_array(cls, values: Any) -> "BlochVector":
        values = np.asarray(values, dtype=float)
        return cls(x=values[0], y=values[1], z=values[2])

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "BlochVector") -> "BlochVector":
        return BlochVector(
            x=self.y * other.z - self.z * other.y,
            y=self.z * other.x - self.x * other.z,
            z=self.x * other.y - self.y * other.x,
        )

    def unit(self) -> "BlochVector":
        norm = self.norm()
        if norm == 0.0:
            raise ConstraintViolation(
                "unit direction", detail="the zero vector has no direction"
            )
        return self * (1.0 / norm)

    def is_unit(self, tolerance: float | None = None) -> bool:
        tolerance = Config.TOLERANCE if tolerance is None else tolerance
        return abs(self.norm() - 1.0) <= tolerance

    def angle_to(self, other: "BlochVector") -> float:
        """Angle in [0, pi] between two nonzero vectors."""

        return math.atan2(self.cross(other).norm(), self.dot(other))

    def __add__(self, other: "BlochVector") -> "BlochVector":
        return BlochVector(x=self.x + other.x, y=self.y + other.y, z=self.z + other.z)

    def __sub__(self, other: "BlochVector") -> "BlochVector":
        return BlochVector(x=self.x - other.x, y=self.y - other.y, z=self.z - other.z)

    def __neg__(self) -> "BlochVector":
        return BlochVector(x=-self.x, y=-self.y, z=-self.z)

    def __mul__(self, scalar: float) -> "BlochVector":
        return BlochVector(x=self.x * scalar, y=self.y * scalar, z=self.z * scalar)

    __rmul__ = __mul__


class QubitState(BaseModel):
    """
    A qubit density operator (I + r.sigma)/2.

    Attributes:
        r (BlochVector): Polarization vector, |r| <= 1.
    """

    model_config = ConfigDict(frozen=True)

    r: BlochVector

    @model_validator(mode="after")
    def _positive(self) -> "QubitState":
        norm = self.r.norm()
        if norm > 1.0 + Config.TOLERANCE:
            raise constraint_error("state positivity", f"|r| = {norm!r} exceeds 1")
        return self

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls(r=BlochVector.zero())


class ObservablePair(BaseModel):
    """
    The two measured observables A = n_A.sigma and B = n_B.sigma.

    Attributes:
        n_a (BlochVector): Unit direction of A.
        n_b (BlochVector): Unit direction of B.
        theta (float): Angle between the directions, strictly inside (0, pi).
    """

    model_config = ConfigDict(frozen=True)

    n_a: BlochVector
    n_b: BlochVector

    @model_validator(mode="after")
    def _unit_and_noncollinear(self) -> "ObservablePair":
        for name, direction in (("n_a", self.n_a), ("n_b", self.n_b)):
            if not direction.is_unit():
                raise constraint_error(
                    "unit direction", f"|{name}| = {direction.norm()!r}"
                )
        if math.sin(self.n_a.angle_to(self.n_b)) <= Config.TOLERANCE:
            raise constraint_error(
                "noncollinear observables", "theta must lie strictly inside (0, pi)"
            )
        return self

    @computed_field
    @cached_property
    def theta(self) -> float:
        return self.n_a.angle_to(self.n_b)

    def direction(self, which: Observable) -> BlochVector:
        return self.n_a if which == "A" else self.n_b


class BlochOperator(BaseModel):
    """
    A Hermitian qubit operator r_coef*I + x.sigma.

    Attributes:
        r_coef (float): Coefficient of the identity.
        x (BlochVector): Coefficients of the Pauli matrices.
    """

    model_config = ConfigDict(frozen=True)

    r_coef: float
    x: BlochVector

    def eigenvalues(self) -> tuple[float, float]:
        norm = self.x.norm()
        return (self.r_coef - norm, self.r_coef + norm)


class PovmElement(BlochOperator):
    """
    A POVM element: 0 <= r_coef*I + x.sigma <= I.

    Attributes:
        r_coef (float): In [0, 1].
        x (BlochVector): |x| <= r_coef and r_coef + |x| <= 1.
    """

    @model_validator(mode="after")
    def _between_zero_and_identity(self) -> "PovmElement":
        tolerance = Config.TOLERANCE
        norm = self.x.norm()
        if not -tolerance <= self.r_coef <= 1.0 + tolerance:
            raise constraint_error("r coefficient range", f"r = {self.r_coef!r}")
        if norm > self.r_coef + tolerance:
            raise constraint_error(
                "positivity", f"|x| = {norm!r} exceeds r = {self.r_coef!r}"
            )
        if self.r_coef + norm > 1.0 + tolerance:
            raise constraint_error(
                "element bounded by identity",
                f"r + |x| = {self.r_coef + norm!r} exceeds 1",
            )
        return self


class JointPovm(BaseModel):
    """
    A simultaneous measurement {E(i, j)} with outcomes (i, j) in {+,-}^2.

    Attributes:
        elements (dict[OutcomePair, PovmElement]): Keyed "++", "+-", "-+", "--".
    """

    model_config = ConfigDict(frozen=True)

    elements: dict[OutcomePair, PovmElement]

    @model_validator(mode="after")
    def _resolution_of_identity(self) -> "JointPovm":
        missing = [key for key in OUTCOME_PAIRS if key not in self.elements]
        if missing:
            raise ValueError(f"missing outcome(s) {', '.join(missing)}")

        tolerance = Config.TOLERANCE
        r_sum = math.fsum(element.r_coef for element in self.elements.values())
        if abs(r_sum - 1.0) > tolerance:
            raise constraint_error("sum of r coefficients", f"sum = {r_sum!r}, expected 1")

        x_sum = np.sum([e.x.as_array() for e in self.elements.values()], axis=0)
        x_sum_norm = float(np.linalg.norm(x_sum))
        if x_sum_norm > tolerance:
            raise constraint_error(
                "sum of x coefficients", f"|sum| = {x_sum_norm!r}, expected 0"
            )
        return self

    def element(self, i: Outcome, j: Outcome) -> PovmElement:
        return self.elements[outcome_key(i, j)]


class PovmElementRecord(BaseModel):
    """One record of the `elements` array in a joint POVM file."""

    i: Outcome
    j: Outcome
    r: float
    x: BlochVector


class JointPovmDocument(BaseModel):
    """
    The JSON document of a joint POVM: {"elements": [{"i", "j", "r", "x"}, ...]}.
    """

    elements: list[PovmElementRecord]

    @field_validator("elements")
    @classmethod
    def _four_distinct_outcomes(
        cls, records: list[PovmElementRecord]
    ) -> list[PovmElementRecord]:
        keys = sorted(outcome_key(record.i, record.j) for record in records)
        if keys != sorted(OUTCOME_PAIRS):
            raise ValueError("expected exactly one record per outcome pair (i, j)")
        return records

    def to_povm(self) -> JointPovm:
        return JointPovm(
            elements={
                outcome_key(record.i, record.j): PovmElement(
                    r_coef=record.r, x=record.x
                )
                for record in self.elements
            }
        )

    @classmethod
    def from_povm(cls, povm: JointPovm) -> "JointPovmDocument":
        return cls(
            elements=[
                PovmElementRecord(i=key[0], j=key[1], r=element.r_coef, x=element.x)
                for key, element in ((k, povm.elements[k]) for k in OUTCOME_PAIRS)
            ]
        )


class StateDocument(BaseModel):
    """The JSON document of a state: {"r": [x, y, z]}."""

    r: BlochVector


class PovmRequest(BaseModel):
    """A joint POVM together with the observables it is meant to measure."""

    povm: JointPovmDocument
    observables: ObservablePair


class ProbabilityRequest(BaseModel):
    povm: JointPovmDocument
    state: StateDocument


class ProbabilityReport(BaseModel):
    """
    Attributes:
        joint (dict[OutcomePair, float]): q(i, j) for the four outcomes.
        marginal_a (dict[Outcome, float]): q_A(+/-).
        marginal_b (dict[Outcome, float]): q_B(+/-).
    """

    joint: dict[OutcomePair, float]
    marginal_a: dict[Outcome, float]
    marginal_b: dict[Outcome, float]
