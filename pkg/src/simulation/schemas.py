"""
This module contains the Pydantic models for finite-sample simulation and
maximum-likelihood estimation of the observables' distributions.

Models:
- OutcomeCounts: Counts of the four joint outcomes over N samples.
- MleEstimate: The constrained maximum-likelihood estimate of p(+) for one observable.
- EstimationReport: Estimates and Fisher information for both observables.
- ObservableAsymptotics: Empirical vs. predicted variance of the estimator.
- TrialRow: One trial of an asymptotic experiment.
- AsymptoticReport: Summary of an asymptotic experiment.
- SplitReport: Accuracies of the sample-splitting strategy.
- EstimateRequest: HTTP body for estimation from observed counts.
"""

from pydantic import BaseModel, ConfigDict, model_validator

from src.bloch.schemas import (
    OUTCOME_PAIRS,
    JointPovmDocument,
    Observable,
    ObservablePair,
    OutcomePair,
    constraint_error,
)
from src.channel.schemas import AccuracyPair, Region


class OutcomeCounts(BaseModel):
    """
    Attributes:
        n (int): Number of samples, at least 1.
        counts (dict[OutcomePair, int]): Nonnegative counts of "++", "+-", "-+", "--".
    """

    model_config = ConfigDict(frozen=True)

    n: int
    counts: dict[OutcomePair, int]

    @model_validator(mode="after")
    def _consistent(self) -> "OutcomeCounts":
        missing = [key for key in OUTCOME_PAIRS if key not in self.counts]
        if missing:
            raise ValueError(f"missing outcome(s) {', '.join(missing)}")
        if self.n < 1:
            raise constraint_error("positive sample size", f"n = {self.n}")
        if any(count < 0 for count in self.counts.values()):
            raise constraint_error("nonnegative counts", f"counts = {self.counts}")
        if sum(self.counts.values()) != self.n:
            raise constraint_error(
                "counts sum to n", f"sum = {sum(self.counts.values())}, n = {self.n}"
            )
        return self

    def marginal(self, which: Observable) -> tuple[int, int]:
        """(N(+), N(-)) for observable A (first label) or B (second label)."""

        position = 0 if which == "A" else 1
        plus = sum(count for key, count in self.counts.items() if key[position] == "+")
        return plus, self.n - plus


class MleEstimate(BaseModel):
    """
    Attributes:
        p_star (float): Estimate of p(+) in [0, 1].
        raw (float): Unconstrained inversion of the observed frequency.
        clipped (bool): Whether `raw` left [0, 1].
    """

    p_star: float
    raw: float
    clipped: bool


class EstimationReport(BaseModel):
    """
    Attributes:
        n (int): Sample count.
        p_star_a, p_star_b (float): Estimates of p_A(+), p_B(+).
        raw_a, raw_b (float): Unclipped inversions.
        clipped_a, clipped_b (bool): Clipping flags.
        accuracy_a, accuracy_b (float): Accuracies of the marginals.
        fisher_a, fisher_b (float | None): Fisher information at the estimate;
            None where it is singular (q(+) in {0, 1}).
    """

    n: int
    p_star_a: float
    p_star_b: float
    raw_a: float
    raw_b: float
    clipped_a: bool
    clipped_b: bool
    accuracy_a: float
    accuracy_b: float
    fisher_a: float | None
    fisher_b: float | None


class ObservableAsymptotics(BaseModel):
    """
    Attributes:
        observable (Observable): "A" or "B".
        p_true (float): True p(+).
        mean_p_star (float): Mean estimate over trials.
        empirical_variance (float): Sample variance of the estimates.
        fisher (float): Fisher information at p_true.
        predicted_variance (float): 1 / (N I).
        ratio (float): empirical_variance * N * I, close to 1 for large N.
        within_window (bool): ratio inside the acceptance window.
        clipped_trials (int): Trials whose estimate was clipped.
    """

    observable: Observable
    p_true: float
    mean_p_star: float
    empirical_variance: float
    fisher: float
    predicted_variance: float
    ratio: float
    within_window: bool
    clipped_trials: int


class TrialRow(BaseModel):
    trial: int
    p_star_a: float | None
    p_star_b: float | None


class AsymptoticReport(BaseModel):
    """
    Attributes:
        n_per_trial (int): Samples per trial.
        trials (int): Number of trials.
        seed (int): Master seed; trial i uses the stream (seed, i).
        window (tuple[float, float]): Acceptance window for the variance ratio.
        observables (list[ObservableAsymptotics]): One summary per requested observable.
        rows (list[TrialRow]): Per-trial estimates.
    """

    n_per_trial: int
    trials: int
    seed: int
    window: tuple[float, float]
    observables: list[ObservableAsymptotics]
    rows: list[TrialRow]


class SplitReport(BaseModel):
    """
    Attributes:
        xi (float): Fraction of samples measured for A.
        theta (float): Angle between the observables.
        effective (AccuracyPair): Per-sample accuracies (xi X_sub_A, (1 - xi) X_sub_B).
        relabeled (AccuracyPair): Accuracies of the four-element POVM with fair-coin
            labels for the unmeasured observable.
        povm (JointPovmDocument): The relabeled POVM.
        region (Region): Domain of the effective pair.
        in_domain_p (bool): X_A + X_B <= 1 for the effective pair.
    """

    xi: float
    theta: float
    effective: AccuracyPair
    relabeled: AccuracyPair
    povm: JointPovmDocument
    region: Region
    in_domain_p: bool


class EstimateRequest(BaseModel):
    povm: JointPovmDocument
    observables: ObservablePair
    counts: OutcomeCounts
