"""
This module contains the Pydantic models describing a marginal measurement as a
classical noisy channel acting on the projective distribution of an observable,
and the verdicts of the accuracy trade-off checks.

Models:
- Conformance: Whether one marginal is a smeared projective measurement of its observable.
- NonidealReport: Conformance of both marginals of a joint POVM.
- NonidealChannel: The 2x2 stochastic matrix F of one marginal.
- ChannelSummary: JSON view of a channel with its accuracy and error.
- AccuracyPair: The accuracies of A and B and the angle between them.
- TradeoffVerdict: Outcome of the accuracy trade-off check.
- ErrorProductVerdict: Outcome of the error-product (or error-disturbance) check.
- ValidationReport: Result of validating a joint POVM against a pair of observables.
- AccuracyReport: Channels, accuracies and both trade-off verdicts of a joint POVM.
"""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, model_validator

from src.config import Config
from src.bloch.schemas import Observable, constraint_error

ConformanceStatus = Literal["conforming", "uninformative", "nonconforming"]
MarginalClass = Literal["projective", "uninformative", "intermediate"]
Region = Literal["P", "Q", "inaccessible"]
Matrix2 = tuple[tuple[float, float], tuple[float, float]]


class Conformance(BaseModel):
    """
    Attributes:
        observable (Observable): "A" or "B".
        status (ConformanceStatus): "uninformative" is conforming with x = 0.
        deviation (float): Angle in radians between x and the observable axis
            (taken modulo antiparallel), 0 when uninformative.
        x_norm (float): |x| of the marginal.
    """

    model_config = ConfigDict(frozen=True)

    observable: Observable
    status: ConformanceStatus
    deviation: float
    x_norm: float

    @property
    def conforming(self) -> bool:
        return self.status != "nonconforming"


class NonidealReport(BaseModel):
    """Conformance of the A and B marginals of a joint POVM."""

    model_config = ConfigDict(frozen=True)

    a: Conformance
    b: Conformance

    @property
    def conforming(self) -> bool:
        return self.a.conforming and self.b.conforming


class NonidealChannel(BaseModel):
    """
    The transition-probability matrix of one marginal.

    Rows are indexed by the measured outcome (+, -), columns by the true outcome.

    Attributes:
        observable (Observable): Which observable the channel belongs to.
        f_matrix (Matrix2): [[r + s|x|, r - s|x|], [1 - r - s|x|, 1 - r + s|x|]].
        orientation (int): s = +1 when x is parallel to the axis (or zero), -1 when antiparallel.
        r_alpha (float): Identity coefficient of the marginal element E(+).
        x_norm (float): |x| of the marginal element E(+).
    """

    model_config = ConfigDict(frozen=True)

    observable: Observable
    f_matrix: Matrix2
    orientation: Literal[1, -1]
    r_alpha: float
    x_norm: float

    @model_validator(mode="after")
    def _stochastic(self) -> "NonidealChannel":
        tolerance = Config.TOLERANCE
        (f_pp, f_pm), (f_mp, f_mm) = self.f_matrix

        for column, total in (("first", f_pp + f_mp), ("second", f_pm + f_mm)):
            if abs(total - 1.0) > tolerance:
                raise constraint_error(
                    "stochastic columns", f"{column} column sums to {total!r}"
                )
        for entry in (f_pp, f_pm, f_mp, f_mm):
            if not -tolerance <= entry <= 1.0 + tolerance:
                raise constraint_error("stochastic entries", f"entry {entry!r}")
        if abs(abs(self.det()) - 2.0 * self.x_norm) > tolerance:
            raise constraint_error(
                "determinant", f"|det F| = {abs(self.det())!r} but 2|x| = {2.0 * self.x_norm!r}"
            )
        return self

    def det(self) -> float:
        (f_pp, f_pm), (f_mp, f_mm) = self.f_matrix
        return f_pp * f_mm - f_pm * f_mp


class ChannelSummary(BaseModel):
    """JSON view: {"f", "accuracy", "error", "orientation"} plus classification."""

    observable: Observable
    f: Matrix2
    accuracy: float
    error: float
    error_infinite: bool
    orientation: int
    classification: MarginalClass


class AccuracyPair(BaseModel):
    """
    Attributes:
        x_a (float): Accuracy of A in [0, 1].
        x_b (float): Accuracy of B in [0, 1].
        theta (float): Angle between the observables in (0, pi).
    """

    model_config = ConfigDict(frozen=True)

    x_a: float
    x_b: float
    theta: float

    @model_validator(mode="after")
    def _in_range(self) -> "AccuracyPair":
        tolerance = Config.TOLERANCE
        for name, value in (("x_a", self.x_a), ("x_b", self.x_b)):
            if not -tolerance <= value <= 1.0 + tolerance:
                raise constraint_error("accuracy range", f"{name} = {value!r}")
        if not 0.0 < self.theta < math.pi:
            raise constraint_error("angle range", f"theta = {self.theta!r}")
        return self

    @classmethod
    def from_errors(cls, e_a: float, e_b: float, theta: float) -> "AccuracyPair":
        """Invert E = 1/X - 1; an infinite error is accuracy 0."""

        return cls(
            x_a=0.0 if math.isinf(e_a) else 1.0 / (1.0 + e_a),
            x_b=0.0 if math.isinf(e_b) else 1.0 / (1.0 + e_b),
            theta=theta,
        )


class TradeoffVerdict(BaseModel):
    """
    Attributes:
        satisfied (bool): value <= 1 within tolerance.
        value (float): X_A + X_B - X_A X_B cos^2(theta).
        slack (float): 1 - value.
        excess (float): max(0, value - 1).
    """

    satisfied: bool
    value: float
    slack: float
    excess: float


class ErrorProductVerdict(BaseModel):
    """
    Attributes:
        satisfied (bool): product >= bound within tolerance.
        error_a (float): E_A = 1/X_A - 1 (infinite when X_A = 0).
        error_b (float): E_B (or the disturbance D_B) likewise.
        product (float): E_A * E_B.
        bound (float): sin^2(theta).
        infinite (bool): True when an accuracy is 0 and the check holds trivially.
    """

    satisfied: bool
    error_a: float
    error_b: float
    product: float
    bound: float
    infinite: bool


class ValidationReport(BaseModel):
    """
    Attributes:
        valid (bool): Every joint-POVM invariant holds (invalid input raises instead).
        conforming (bool): Both marginals satisfy the nonideal condition.
        theta (float): Angle between the observables.
        nonideal (NonidealReport): Per-marginal conformance.
    """

    valid: bool
    conforming: bool
    theta: float
    nonideal: NonidealReport


class AccuracyReport(BaseModel):
    """
    Attributes:
        accuracies (AccuracyPair): X_A, X_B and theta.
        a, b (ChannelSummary): The two channels.
        tradeoff (TradeoffVerdict): Accuracy trade-off check.
        error_product (ErrorProductVerdict): Error-product check.
        unbiased_possible (bool): Both marginals projective.
    """

    accuracies: AccuracyPair
    a: ChannelSummary
    b: ChannelSummary
    tradeoff: TradeoffVerdict
    error_product: ErrorProductVerdict
    unbiased_possible: bool
