"""
Finite-sample simulation of joint measurements and maximum-likelihood
reconstruction of the observables' distributions from the measured marginals.

Each marginal is a channel q = F p, so its outcome counts carry information on
p(+) only through det F. Estimates are made for each marginal separately.
"""

import math
from typing import Callable, NamedTuple

import numpy as np

from src.config import Config
from src.errors import InvalidParameter, NoInformation, SingularInformation
from src.logger import get_logger
from src.utils import derive_rng, ordered_imap
from src.bloch.schemas import (
    OUTCOME_PAIRS,
    BlochVector,
    JointPovm,
    JointPovmDocument,
    Observable,
    ObservablePair,
    PovmElement,
    QubitState,
    constraint_guard,
)
from src.bloch.service import (
    load_json,
    outcome_distribution,
    projector_probability,
    validate_document,
)
from src.channel.schemas import AccuracyPair, NonidealChannel
from src.channel.service import accuracy, accuracy_pair, apply_channel, build_channel
from src.optimal.service import classify_region
from src.simulation.schemas import (
    AsymptoticReport,
    EstimationReport,
    MleEstimate,
    ObservableAsymptotics,
    OutcomeCounts,
    SplitReport,
    TrialRow,
)

logger = get_logger("simulation")

VARIANCE_WINDOW = (0.9, 1.1)


def _probability_vector(povm: JointPovm, state: QubitState) -> np.ndarray:
    distribution = outcome_distribution(povm, state)
    probabilities = np.array([distribution[key] for key in OUTCOME_PAIRS])

    return probabilities / probabilities.sum()


def _draw_counts(
    probabilities: np.ndarray, n: int, rng: np.random.Generator
) -> OutcomeCounts:
    draws = rng.multinomial(n, probabilities)

    return OutcomeCounts(
        n=n, counts={key: int(count) for key, count in zip(OUTCOME_PAIRS, draws)}
    )


def simulate(
    povm: JointPovm,
    state: QubitState,
    n: int,
    rng_seed: int | np.random.Generator,
) -> OutcomeCounts:
    """
    Draw `n` independent outcomes of `povm` on `state`.

    Args:
        povm (JointPovm): The joint measurement.
        state (QubitState): The measured state.
        n (int): Number of samples, at least 1.
        rng_seed (int | np.random.Generator): Seed, or a generator to draw from.

    Returns:
        OutcomeCounts: Counts of the four outcomes.
    """

    if n < 1:
        raise InvalidParameter("n must be at least 1", n=n)

    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else derive_rng(rng_seed)

    return _draw_counts(_probability_vector(povm, state), n, rng)


def log_likelihood(
    channel: NonidealChannel, counts: tuple[int, int], p_plus: float
) -> float:
    """
    sum_i N(i) ln q(i) with q = F (p_plus, 1 - p_plus).

    Zero counts contribute nothing, so an empty sample has likelihood 0.

    Returns:
        float: `-math.inf` when an outcome of probability 0 was observed.
    """

    q = apply_channel(channel, p_plus)
    total = 0.0

    for outcome, count in zip(("+", "-"), counts):
        if count == 0:
            continue
        probability = min(max(q[outcome], 0.0), 1.0)
        if probability == 0.0:
            return -math.inf
        total += count * math.log(probability)

    return total


def mle_estimate(channel: NonidealChannel, counts: tuple[int, int]) -> MleEstimate:
    """
    The maximum-likelihood estimate of p(+) on [0, 1].

    The likelihood is concave in p with its unconstrained maximum at
    (N(+)/N - F_{+-}) / (F_{++} - F_{+-}); clipping that value to [0, 1]
    gives the constrained maximum.

    Args:
        channel (NonidealChannel): The marginal's channel.
        counts (tuple[int, int]): (N(+), N(-)).

    Raises:
        NoInformation: If the channel is uninformative.
        InvalidParameter: If the counts are negative or empty.
    """

    n_plus, n_minus = counts
    n = n_plus + n_minus

    if n_plus < 0 or n_minus < 0 or n == 0:
        raise InvalidParameter("counts must be nonnegative with a positive total", counts=list(counts))
    if accuracy(channel) <= Config.TOLERANCE:
        raise NoInformation(f"marginal {channel.observable} has accuracy 0")

    (f_pp, f_pm), _ = channel.f_matrix
    raw = (n_plus / n - f_pm) / (f_pp - f_pm)
    p_star = min(max(raw, 0.0), 1.0)

    return MleEstimate(p_star=p_star, raw=raw, clipped=p_star != raw)


def fisher_information(channel: NonidealChannel, p_plus: float) -> float:
    """
    Per-sample Fisher information X / (q(+) q(-)) about p(+).

    An uninformative channel (X = 0) carries no information and returns 0.

    Raises:
        SingularInformation: If q(+) is 0 or 1 for an informative channel.
    """

    value = accuracy(channel)
    if value == 0.0:
        return 0.0

    q = apply_channel(channel, p_plus)
    variance = q["+"] * q["-"]
    if variance <= Config.TOLERANCE:
        raise SingularInformation(
            f"q(+) = {q['+']!r} for marginal {channel.observable}", p_plus=p_plus
        )

    return value / variance


def _fisher_or_none(channel: NonidealChannel, p_plus: float) -> float | None:
    try:
        return fisher_information(channel, p_plus)
    except SingularInformation:
        return None


def estimate(
    povm: JointPovm, obs: ObservablePair, counts: OutcomeCounts
) -> EstimationReport:
    """
    Estimate p_A(+) and p_B(+) from one run's counts.

    Fisher information is evaluated at the estimates, and is None where it is
    singular (an estimate on the boundary of a projective marginal).
    """

    channel_a = build_channel(povm, obs, "A")
    channel_b = build_channel(povm, obs, "B")
    estimate_a = mle_estimate(channel_a, counts.marginal("A"))
    estimate_b = mle_estimate(channel_b, counts.marginal("B"))

    return EstimationReport(
        n=counts.n,
        p_star_a=estimate_a.p_star,
        p_star_b=estimate_b.p_star,
        raw_a=estimate_a.raw,
        raw_b=estimate_b.raw,
        clipped_a=estimate_a.clipped,
        clipped_b=estimate_b.clipped,
        accuracy_a=accuracy(channel_a),
        accuracy_b=accuracy(channel_b),
        fisher_a=_fisher_or_none(channel_a, estimate_a.p_star),
        fisher_b=_fisher_or_none(channel_b, estimate_b.p_star),
    )


class _TrialTask(NamedTuple):
    index: int
    seed: int
    n: int
    probabilities: np.ndarray
    channels: dict[Observable, NonidealChannel]


def _run_trial(task: _TrialTask) -> dict[Observable, MleEstimate]:
    counts = _draw_counts(task.probabilities, task.n, derive_rng(task.seed, task.index))

    return {
        which: mle_estimate(channel, counts.marginal(which))
        for which, channel in task.channels.items()
    }


def asymptotic_experiment(
    povm: JointPovm,
    obs: ObservablePair,
    state: QubitState,
    n_per_trial: int,
    trials: int,
    rng_seed: int,
    observables: tuple[Observable, ...] = ("A", "B"),
    workers: int | None = None,
    on_trial: Callable[[TrialRow], None] | None = None,
) -> AsymptoticReport:
    """
    Compare the spread of the estimator with its asymptotic variance 1 / (N I).

    Args:
        povm (JointPovm): The joint measurement.
        obs (ObservablePair): The observables.
        state (QubitState): The measured state; p(+) must be interior for every
            requested observable.
        n_per_trial (int): Samples per trial.
        trials (int): Independent trials, at least 2.
        rng_seed (int): Master seed; trial i draws from the stream (seed, i).
        observables (tuple[Observable, ...]): Observables to estimate.
        workers (int | None): Process-pool width.
        on_trial (Callable[[TrialRow], None] | None): Called with each trial's
            row, in trial order, as soon as it is available.

    Returns:
        AsymptoticReport: Per-observable variance ratios and per-trial estimates.
    """

    workers = Config.WORKERS if workers is None else workers

    if n_per_trial < 1:
        raise InvalidParameter("n_per_trial must be at least 1", n_per_trial=n_per_trial)
    if trials < 2:
        raise InvalidParameter("trials must be at least 2", trials=trials)
    if not observables:
        raise InvalidParameter("at least one observable is required")

    channels: dict[Observable, NonidealChannel] = {}
    truths: dict[Observable, float] = {}
    for which in dict.fromkeys(observables):
        p_true = projector_probability(state, obs.direction(which), "+")
        if min(p_true, 1.0 - p_true) <= Config.TOLERANCE:
            raise InvalidParameter(
                f"p_{which}(+) must lie strictly inside (0, 1)", p_true=p_true
            )
        channel = build_channel(povm, obs, which)
        if accuracy(channel) <= Config.TOLERANCE:
            raise NoInformation(f"marginal {which} has accuracy 0")
        channels[which] = channel
        truths[which] = p_true

    probabilities = _probability_vector(povm, state)
    tasks = [
        _TrialTask(
            index=index,
            seed=rng_seed,
            n=n_per_trial,
            probabilities=probabilities,
            channels=channels,
        )
        for index in range(trials)
    ]

    logger.info(
        "running %d trials of %d samples with %d worker(s)", trials, n_per_trial, workers
    )
    results: list[dict[Observable, MleEstimate]] = []
    rows: list[TrialRow] = []
    for index, result in enumerate(ordered_imap(_run_trial, tasks, workers=workers)):
        row = TrialRow(
            trial=index,
            p_star_a=result["A"].p_star if "A" in result else None,
            p_star_b=result["B"].p_star if "B" in result else None,
        )
        results.append(result)
        rows.append(row)
        if on_trial is not None:
            on_trial(row)

    summaries = []
    for which, channel in channels.items():
        estimates = np.array([result[which].p_star for result in results])
        fisher = fisher_information(channel, truths[which])
        variance = float(np.var(estimates, ddof=1))
        ratio = variance * n_per_trial * fisher
        within = VARIANCE_WINDOW[0] <= ratio <= VARIANCE_WINDOW[1]

        if not within:
            logger.warning(
                "variance ratio %.4g for %s is outside [%g, %g]", ratio, which, *VARIANCE_WINDOW
            )

        summaries.append(
            ObservableAsymptotics(
                observable=which,
                p_true=truths[which],
                mean_p_star=float(estimates.mean()),
                empirical_variance=variance,
                fisher=fisher,
                predicted_variance=1.0 / (n_per_trial * fisher),
                ratio=ratio,
                within_window=within,
                clipped_trials=sum(result[which].clipped for result in results),
            )
        )

    return AsymptoticReport(
        n_per_trial=n_per_trial,
        trials=trials,
        seed=rng_seed,
        window=VARIANCE_WINDOW,
        observables=summaries,
        rows=rows,
    )


def split_strategy(
    obs: ObservablePair,
    xi: float,
    sub_accuracy_a: float = 1.0,
    sub_accuracy_b: float = 1.0,
) -> SplitReport:
    """
    Measure A on a fraction `xi` of the samples and B on the rest.

    The sub-measurements are E_alpha(+/-) = (I +/- sqrt(X_sub) n_alpha.sigma)/2,
    projective by default. Per sample, the strategy gathers xi X_sub_A about A
    and (1 - xi) X_sub_B about B, so X_A + X_B <= 1. Written as one four-outcome
    POVM, E(i, j) = (xi/2) E_A(i) + ((1 - xi)/2) E_B(j), where the label of the
    observable not measured is a fair coin.

    Raises:
        InvalidParameter: If xi is outside (0, 1) or a sub-accuracy outside [0, 1].
    """

    if not 0.0 < xi < 1.0:
        raise InvalidParameter("xi must lie strictly inside (0, 1)", xi=xi)
    for name, value in (("sub_accuracy_a", sub_accuracy_a), ("sub_accuracy_b", sub_accuracy_b)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameter(f"{name} must lie in [0, 1]", **{name: value})

    half_a = obs.n_a * (xi * math.sqrt(sub_accuracy_a) / 4.0)
    half_b = obs.n_b * ((1.0 - xi) * math.sqrt(sub_accuracy_b) / 4.0)
    vectors: dict[str, BlochVector] = {
        "++": half_a + half_b,
        "+-": half_a - half_b,
        "-+": half_b - half_a,
        "--": -(half_a + half_b),
    }

    with constraint_guard():
        povm = JointPovm(
            elements={
                key: PovmElement(r_coef=0.25, x=vector) for key, vector in vectors.items()
            }
        )
        effective = AccuracyPair(
            x_a=xi * sub_accuracy_a, x_b=(1.0 - xi) * sub_accuracy_b, theta=obs.theta
        )

    return SplitReport(
        xi=xi,
        theta=obs.theta,
        effective=effective,
        relabeled=accuracy_pair(povm, obs),
        povm=JointPovmDocument.from_povm(povm),
        region=classify_region(effective),
        in_domain_p=effective.x_a + effective.x_b <= 1.0 + Config.TOLERANCE,
    )


def parse_counts(text: str) -> OutcomeCounts:
    """Parse {"n": N, "counts": {"++": .., "+-": .., "-+": .., "--": ..}}."""

    return validate_document(OutcomeCounts, load_json(text))


class SimulationService:
    """
    Sampling, estimation and the sample-splitting baseline, for the routes and
    the CLI.
    """

    def read_counts(self, text: str) -> OutcomeCounts:
        return parse_counts(text)

    def simulate(
        self, povm: JointPovm, state: QubitState, n: int, rng_seed: int
    ) -> OutcomeCounts:
        return simulate(povm, state, n, rng_seed)

    def estimate(
        self, povm: JointPovm, obs: ObservablePair, counts: OutcomeCounts
    ) -> EstimationReport:
        """
        Estimate both observables' distributions from the counts of one run.

        Raises:
            NonidealConditionViolated: If a marginal is not a smeared projective measurement.
            NoInformation: If a marginal has accuracy 0.
        """

        return estimate(povm, obs, counts)

    def experiment(
        self,
        povm: JointPovm,
        obs: ObservablePair,
        state: QubitState,
        n_per_trial: int,
        trials: int,
        rng_seed: int,
        observables: tuple[Observable, ...] = ("A", "B"),
        workers: int | None = None,
        on_trial: Callable[[TrialRow], None] | None = None,
    ) -> AsymptoticReport:
        return asymptotic_experiment(
            povm,
            obs,
            state,
            n_per_trial=n_per_trial,
            trials=trials,
            rng_seed=rng_seed,
            observables=observables,
            workers=workers,
            on_trial=on_trial,
        )

    def split(
        self,
        obs: ObservablePair,
        xi: float,
        sub_accuracy_a: float = 1.0,
        sub_accuracy_b: float = 1.0,
    ) -> SplitReport:
        return split_strategy(obs, xi, sub_accuracy_a, sub_accuracy_b)
