"""
This module contains the Pydantic models for the optimal joint measurement and
for the accessible region of accuracy pairs.

Models:
- OptimalReport: The equality-achieving POVM for an observable pair with its accuracies.
- RegionPoint: One point of the numerically mapped accuracy frontier.
- SweepReport: A full frontier sweep for one angle.
- FuzzReport: Violation counts over a random corpus of valid nonideal joint POVMs.
- BoundaryPoint: One point of the analytic frontier.
- TradeoffReport: Both trade-off verdicts and the domain of an accuracy pair.
"""

import math

from pydantic import BaseModel, ConfigDict, model_validator

from src.config import Config
from src.bloch.schemas import JointPovm, JointPovmDocument, constraint_error
from src.channel.schemas import (
    AccuracyPair,
    ErrorProductVerdict,
    Region,
    TradeoffVerdict,
)


class OptimalReport(BaseModel):
    """
    Attributes:
        theta (float): Angle between the observables.
        povm (JointPovmDocument): The optimal POVM in file form.
        accuracies (AccuracyPair): Accuracies measured from the POVM's channels.
        closed_form (float): 1 / (1 + sin theta).
        tradeoff (TradeoffVerdict): The trade-off check, with zero slack.
        region (Region): "Q" unless theta = pi/2, where the optimum sits on the P/Q border.
    """

    theta: float
    povm: JointPovmDocument
    accuracies: AccuracyPair
    closed_form: float
    tradeoff: TradeoffVerdict
    region: Region


class RegionPoint(BaseModel):
    """
    Attributes:
        index (int): Grid index.
        theta (float): Angle between the observables.
        x_a_target (float): Requested accuracy of A.
        x_a (float): Accuracy of A measured from the witness.
        x_b (float): Largest accuracy of B found, measured from the witness.
        x_b_boundary (float): Analytic frontier value at x_a.
        gap (float): x_b_boundary - x_b.
        achieved_by (JointPovm | None): Witness POVM.
    """

    model_config = ConfigDict(frozen=True)

    index: int
    theta: float
    x_a_target: float
    x_a: float
    x_b: float
    x_b_boundary: float
    gap: float
    achieved_by: JointPovm | None = None

    @model_validator(mode="after")
    def _inside_tradeoff(self) -> "RegionPoint":
        value = self.x_a + self.x_b - self.x_a * self.x_b * math.cos(self.theta) ** 2
        if value > 1.0 + Config.FRONTIER_TOLERANCE:
            raise constraint_error(
                "accuracy trade-off", f"X_A + X_B - X_A X_B cos^2 = {value!r}"
            )
        return self


class SweepReport(BaseModel):
    """
    Attributes:
        theta (float): Angle between the observables.
        grid_size (int): Number of targets on [0, 1].
        seed (int): Master seed; point i uses the stream (seed, i).
        restarts (int): Nelder-Mead starts per point.
        points (list[RegionPoint]): One point per target.
        max_gap (float): Largest boundary - achieved gap.
        exceeded (int): Points above the boundary by more than the frontier tolerance.
    """

    theta: float
    grid_size: int
    seed: int
    restarts: int
    points: list[RegionPoint]
    max_gap: float
    exceeded: int


class FuzzReport(BaseModel):
    """
    Attributes:
        cases (int): Sampled joint POVMs.
        seed (int): Master seed.
        invalid_povms (int): Samples breaking the POVM constraints (expected 0).
        nonconforming (int): Samples whose marginals leave their axes (expected 0).
        tradeoff_violations (int): Samples with X_A + X_B - X_A X_B cos^2 > 1.
        triangle_violations (int): Samples with |x_A + x_B| + |x_A - x_B| > 1.
        verdict_mismatches (int): Positive-accuracy samples where the error-product
            verdict differs from the trade-off verdict.
        double_projective (int): Samples with X_A = X_B = 1.
        max_tradeoff_value (float): Largest X_A + X_B - X_A X_B cos^2 seen.
    """

    cases: int
    seed: int
    invalid_povms: int
    nonconforming: int
    tradeoff_violations: int
    triangle_violations: int
    verdict_mismatches: int
    double_projective: int
    max_tradeoff_value: float


class BoundaryPoint(BaseModel):
    theta: float
    x_a: float
    x_b: float


class TradeoffReport(BaseModel):
    """
    Attributes:
        accuracies (AccuracyPair): The checked pair.
        tradeoff (TradeoffVerdict): X_A + X_B - X_A X_B cos^2(theta) <= 1.
        error_product (ErrorProductVerdict): E_A E_B >= sin^2(theta).
        region (Region): Domain of the pair.
    """

    accuracies: AccuracyPair
    tradeoff: TradeoffVerdict
    error_product: ErrorProductVerdict
    region: Region
