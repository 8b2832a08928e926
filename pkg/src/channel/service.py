"""
Nonideal joint measurements as classical channels.

A marginal E_alpha(+) = r I + x.sigma conforms to the nonideal joint-measurement
condition when x is parallel or antiparallel to the observable axis n_alpha (or
zero). Then q_alpha = F_alpha p_alpha for a 2x2 stochastic matrix F_alpha, and
the accuracy of the marginal is X_alpha = (det F_alpha)^2 = 4|x|^2.
"""

import math

from src.config import Config
from src.errors import InvalidParameter, NonidealConditionViolated
from src.logger import get_logger
from src.bloch.schemas import (
    BlochOperator,
    BlochVector,
    JointPovm,
    Observable,
    ObservablePair,
    Outcome,
    constraint_guard,
)
from src.bloch.service import marginals
from src.channel.schemas import (
    AccuracyPair,
    AccuracyReport,
    ChannelSummary,
    Conformance,
    ErrorProductVerdict,
    MarginalClass,
    NonidealChannel,
    NonidealReport,
    TradeoffVerdict,
    ValidationReport,
)

logger = get_logger("channel")


def conformance(
    element_plus: BlochOperator, direction: BlochVector, observable: Observable
) -> Conformance:
    """
    Check one marginal against its observable axis.

    Args:
        element_plus (BlochOperator): The marginal element E_alpha(+).
        direction (BlochVector): The unit axis n_alpha.
        observable (Observable): "A" or "B", for reporting.

    Returns:
        Conformance: uninformative when |x| < tol, conforming when the angle to
            the axis (modulo antiparallel) is below the parallel tolerance.
    """

    x = element_plus.x
    x_norm = x.norm()

    if x_norm < Config.TOLERANCE:
        return Conformance(
            observable=observable, status="uninformative", deviation=0.0, x_norm=x_norm
        )

    deviation = math.atan2(x.cross(direction).norm(), abs(x.dot(direction)))
    status = "conforming" if deviation < Config.PARALLEL_TOLERANCE else "nonconforming"

    return Conformance(
        observable=observable, status=status, deviation=deviation, x_norm=x_norm
    )


def check_nonideal(povm: JointPovm, obs: ObservablePair) -> NonidealReport:
    """Per-observable verdict on the nonideal joint-measurement condition."""

    marginal_a, marginal_b = marginals(povm)

    return NonidealReport(
        a=conformance(marginal_a, obs.n_a, "A"),
        b=conformance(marginal_b, obs.n_b, "B"),
    )


def channel_from_marginal(
    element_plus: BlochOperator, direction: BlochVector, observable: Observable
) -> NonidealChannel:
    """
    Build F for a marginal element along `direction`.

    Raises:
        NonidealConditionViolated: If x is not (anti)parallel to `direction`.
    """

    verdict = conformance(element_plus, direction, observable)
    if not verdict.conforming:
        logger.debug(
            "marginal %s is %.3g rad off its axis", observable, verdict.deviation
        )
        raise NonidealConditionViolated(observable, verdict.deviation)

    r_alpha = element_plus.r_coef
    x_norm = 0.0 if verdict.status == "uninformative" else verdict.x_norm

    orientation = 1
    if verdict.status == "conforming" and element_plus.x.dot(direction) < 0.0:
        orientation = -1
    signed = orientation * x_norm

    with constraint_guard():
        return NonidealChannel(
            observable=observable,
            f_matrix=(
                (r_alpha + signed, r_alpha - signed),
                (1.0 - r_alpha - signed, 1.0 - r_alpha + signed),
            ),
            orientation=orientation,
            r_alpha=r_alpha,
            x_norm=x_norm,
        )


def build_channel(
    povm: JointPovm, obs: ObservablePair, which: Observable
) -> NonidealChannel:
    """
    The stochastic matrix F of the A or B marginal of `povm`.

    Args:
        povm (JointPovm): The joint measurement.
        obs (ObservablePair): The observables.
        which (Observable): "A" or "B".

    Returns:
        NonidealChannel: The channel with orientation s = sign(x . n).

    Raises:
        NonidealConditionViolated: If the chosen marginal does not conform.
    """

    marginal_a, marginal_b = marginals(povm)
    element = marginal_a if which == "A" else marginal_b

    return channel_from_marginal(element, obs.direction(which), which)


def channel_pair(
    povm: JointPovm, obs: ObservablePair
) -> tuple[NonidealChannel, NonidealChannel]:
    return build_channel(povm, obs, "A"), build_channel(povm, obs, "B")


def accuracy(channel: NonidealChannel) -> float:
    """X = (det F)^2, in [0, 1]."""

    return min(channel.det() ** 2, 1.0)


def accuracy_pair(povm: JointPovm, obs: ObservablePair) -> AccuracyPair:
    """The accuracies of both marginals of a nonideal joint POVM."""

    channel_a, channel_b = channel_pair(povm, obs)

    with constraint_guard():
        return AccuracyPair(
            x_a=accuracy(channel_a), x_b=accuracy(channel_b), theta=obs.theta
        )


def error_param(accuracy_value: float) -> float:
    """
    The measurement error E = 1/X - 1.

    Returns:
        float: In [0, inf); `math.inf` for an uninformative marginal (X = 0).

    Raises:
        InvalidParameter: If the accuracy lies outside [0, 1].
    """

    if not 0.0 <= accuracy_value <= 1.0 + Config.TOLERANCE:
        raise InvalidParameter("accuracy must lie in [0, 1]", accuracy=accuracy_value)

    if accuracy_value == 0.0:
        return math.inf

    return max(1.0 / accuracy_value - 1.0, 0.0)


def tradeoff_check(pair: AccuracyPair) -> TradeoffVerdict:
    """
    Check X_A + X_B - X_A X_B cos^2(theta) <= 1.
    """

    value = pair.x_a + pair.x_b - pair.x_a * pair.x_b * math.cos(pair.theta) ** 2

    return TradeoffVerdict(
        satisfied=value <= 1.0 + Config.TOLERANCE,
        value=value,
        slack=1.0 - value,
        excess=max(value - 1.0, 0.0),
    )


def error_product_check(pair: AccuracyPair) -> ErrorProductVerdict:
    """
    Check E_A E_B >= sin^2(theta).

    Feeding the disturbance accuracy in place of X_B checks E_A D_B >= sin^2(theta)
    with the same code.

    The tolerance is applied in accuracy units: E_A E_B - sin^2 = slack / (X_A X_B),
    so the verdict always agrees with `tradeoff_check`.
    """

    bound = math.sin(pair.theta) ** 2
    error_a = error_param(pair.x_a)
    error_b = error_param(pair.x_b)

    if math.isinf(error_a) or math.isinf(error_b):
        return ErrorProductVerdict(
            satisfied=True,
            error_a=error_a,
            error_b=error_b,
            product=math.inf,
            bound=bound,
            infinite=True,
        )

    product = error_a * error_b
    tolerance = Config.TOLERANCE / (pair.x_a * pair.x_b)

    return ErrorProductVerdict(
        satisfied=product >= bound - tolerance,
        error_a=error_a,
        error_b=error_b,
        product=product,
        bound=bound,
        infinite=False,
    )


def classify_marginal(channel: NonidealChannel) -> MarginalClass:
    """projective when X = 1, uninformative when X = 0, intermediate otherwise."""

    value = accuracy(channel)

    if abs(value - 1.0) <= Config.TOLERANCE:
        return "projective"
    if value <= Config.TOLERANCE:
        return "uninformative"

    return "intermediate"


def apply_channel(channel: NonidealChannel, p_plus: float) -> dict[Outcome, float]:
    """q = F p for the true distribution (p_plus, 1 - p_plus)."""

    if not 0.0 <= p_plus <= 1.0:
        raise InvalidParameter("p_plus must lie in [0, 1]", p_plus=p_plus)

    (f_pp, f_pm), _ = channel.f_matrix
    q_plus = f_pp * p_plus + f_pm * (1.0 - p_plus)

    return {"+": q_plus, "-": 1.0 - q_plus}


def unbiased_possible(povm: JointPovm, obs: ObservablePair) -> bool:
    """True only if both marginals are projective, which no valid joint POVM achieves."""

    channel_a, channel_b = channel_pair(povm, obs)

    return classify_marginal(channel_a) == "projective" and (
        classify_marginal(channel_b) == "projective"
    )


def summarize_channel(channel: NonidealChannel) -> ChannelSummary:
    value = accuracy(channel)
    error = error_param(value)

    return ChannelSummary(
        observable=channel.observable,
        f=channel.f_matrix,
        accuracy=value,
        error=error,
        error_infinite=math.isinf(error),
        orientation=channel.orientation,
        classification=classify_marginal(channel),
    )


def validation_report(povm: JointPovm, obs: ObservablePair) -> ValidationReport:
    report = check_nonideal(povm, obs)

    return ValidationReport(
        valid=True, conforming=report.conforming, theta=obs.theta, nonideal=report
    )


def accuracy_report(povm: JointPovm, obs: ObservablePair) -> AccuracyReport:
    """
    Build both channels and run the trade-off checks on their accuracies.

    Raises:
        NonidealConditionViolated: If a marginal does not conform.
    """

    channel_a, channel_b = channel_pair(povm, obs)
    with constraint_guard():
        pair = AccuracyPair(
            x_a=accuracy(channel_a), x_b=accuracy(channel_b), theta=obs.theta
        )

    return AccuracyReport(
        accuracies=pair,
        a=summarize_channel(channel_a),
        b=summarize_channel(channel_b),
        tradeoff=tradeoff_check(pair),
        error_product=error_product_check(pair),
        unbiased_possible=classify_marginal(channel_a) == "projective"
        and classify_marginal(channel_b) == "projective",
    )


class ChannelService:
    """
    The channel view of a joint POVM, as served to the routes and the CLI.
    """

    def validate(self, povm: JointPovm, obs: ObservablePair) -> ValidationReport:
        """
        Validate a joint POVM against a pair of observables.

        Args:
            povm (JointPovm): A POVM that already satisfies its invariants.
            obs (ObservablePair): The observables.

        Returns:
            ValidationReport: Conformance of both marginals; never raises on a
                nonconforming marginal.
        """

        return validation_report(povm, obs)

    def accuracy(self, povm: JointPovm, obs: ObservablePair) -> AccuracyReport:
        return accuracy_report(povm, obs)
