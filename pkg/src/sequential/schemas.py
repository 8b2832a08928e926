"""
This module contains the Pydantic models for a measurement of A followed by a
measurement of B.

Models:
- SqrtInstrument: The square-root instrument of the unsharp observable of A.
- PostMeasurementState: The state after a selective outcome of the instrument.
- DisturbanceVerdict: The error/back-action check on the induced joint POVM.
- SequentialReport: The induced joint POVM with its channel verdicts.
"""

import math

from pydantic import BaseModel, ConfigDict, model_validator

from src.bloch.schemas import (
    BlochVector,
    JointPovmDocument,
    Outcome,
    QubitState,
    constraint_error,
)
from src.channel.schemas import NonidealReport


class SqrtInstrument(BaseModel):
    """
    Kraus pair M(+/-) = sqrt((I +/- eta n.sigma)/2) = a I +/- b n.sigma.

    Attributes:
        eta (float): Sharpness in [0, 1]; 1 is the projective measurement of A.
        axis (BlochVector): Unit axis n of A.
    """

    model_config = ConfigDict(frozen=True)

    eta: float
    axis: BlochVector

    @model_validator(mode="after")
    def _valid(self) -> "SqrtInstrument":
        if not 0.0 <= self.eta <= 1.0:
            raise constraint_error("sharpness range", f"eta = {self.eta!r}")
        if not self.axis.is_unit():
            raise constraint_error("unit direction", f"|axis| = {self.axis.norm()!r}")
        return self

    @property
    def a(self) -> float:
        return (math.sqrt((1.0 + self.eta) / 2.0) + math.sqrt((1.0 - self.eta) / 2.0)) / 2.0

    @property
    def b(self) -> float:
        return (math.sqrt((1.0 + self.eta) / 2.0) - math.sqrt((1.0 - self.eta) / 2.0)) / 2.0


class PostMeasurementState(BaseModel):
    """
    Attributes:
        outcome (Outcome): Selected outcome of A.
        probability (float): tr(M rho M).
        state (QubitState): M rho M / tr(M rho M).
    """

    outcome: Outcome
    probability: float
    state: QubitState


class DisturbanceVerdict(BaseModel):
    """
    Outcome of the error/back-action check E_A D_B >= sin^2(theta).

    When a marginal of the sequential POVM is not a smeared projective
    measurement, the check does not apply and only the B deviation is set.

    Attributes:
        applicable (bool): Both marginals conform.
        x_a (float | None): Accuracy of A.
        x_b (float | None): Accuracy of B after the A measurement.
        error_a (float | None): E_A = 1/X_A - 1.
        disturbance_b (float | None): D_B = 1/X_B - 1.
        product (float | None): E_A * D_B.
        bound (float): sin^2(theta).
        satisfied (bool | None): product >= bound within tolerance.
        infinite (bool): An accuracy is 0 and the check holds trivially.
        deviation_b (float): Angle between the B marginal and n_B.
    """

    applicable: bool
    x_a: float | None = None
    x_b: float | None = None
    error_a: float | None = None
    disturbance_b: float | None = None
    product: float | None = None
    bound: float
    satisfied: bool | None = None
    infinite: bool = False
    deviation_b: float


class SequentialReport(BaseModel):
    """
    Attributes:
        eta (float): Sharpness of the A measurement.
        theta (float): Angle between the observables.
        povm (JointPovmDocument): Induced joint POVM E(i, j) = M(i) P_B(j) M(i).
        nonideal (NonidealReport): Conformance of both marginals.
        verdict (DisturbanceVerdict): Error/back-action check.
    """

    eta: float
    theta: float
    povm: JointPovmDocument
    nonideal: NonidealReport
    verdict: DisturbanceVerdict
