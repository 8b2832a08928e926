"""
A measurement of A followed by a projective measurement of B.

The first measurement is the square-root instrument of the unsharp observable
(I +/- eta n_A.sigma)/2. Its Kraus operators M(+/-) = a I +/- b n_A.sigma are
Hermitian, so every product below is a `sandwich` in the Bloch representation.

With ab = eta/4 and a^2 - b^2 = sqrt(1 - eta^2)/2 the induced POVM is

    r_ij = 1/4 + i j a b cos(theta)
    x_ij = i a b n_A + j b^2 cos(theta) n_A + j (a^2 - b^2)/2 n_B,

whose A marginal is (eta/2) n_A and whose B marginal picks up a component along
n_A unless the observables are orthogonal.
"""

import math

from src.config import Config
from src.errors import InvalidParameter
from src.logger import get_logger
from src.bloch.schemas import (
    OUTCOMES,
    SIGN,
    BlochOperator,
    JointPovm,
    JointPovmDocument,
    ObservablePair,
    Outcome,
    PovmElement,
    QubitState,
    constraint_guard,
    outcome_key,
)
from src.bloch.service import projector_element, sandwich
from src.channel.service import accuracy_pair, check_nonideal, error_product_check
from src.sequential.schemas import (
    DisturbanceVerdict,
    PostMeasurementState,
    SequentialReport,
    SqrtInstrument,
)

logger = get_logger("sequential")


def instrument_for(obs: ObservablePair, eta: float) -> SqrtInstrument:
    """The square-root instrument of sharpness `eta` along n_A."""

    with constraint_guard():
        return SqrtInstrument(eta=eta, axis=obs.n_a)


def kraus_operator(inst: SqrtInstrument, outcome: Outcome) -> BlochOperator:
    """M(outcome) = a I + s b n.sigma."""

    return BlochOperator(r_coef=inst.a, x=inst.axis * (SIGN[outcome] * inst.b))


def _state_operator(state: QubitState) -> BlochOperator:
    return BlochOperator(r_coef=0.5, x=state.r * 0.5)


def sequential_joint_povm(inst: SqrtInstrument, obs: ObservablePair) -> JointPovm:
    """
    E(i, j) = M(i) P_B(j) M(i) for the instrument followed by B.

    Raises:
        InvalidParameter: If the instrument axis is not n_A.
    """

    if (inst.axis - obs.n_a).norm() > Config.TOLERANCE:
        raise InvalidParameter("the instrument must measure along n_A")

    elements = {}
    for i in OUTCOMES:
        kraus = kraus_operator(inst, i)
        for j in OUTCOMES:
            product = sandwich(kraus, projector_element(obs.n_b, j))
            elements[outcome_key(i, j)] = (product.r_coef, product.x)

    with constraint_guard():
        return JointPovm(
            elements={
                key: PovmElement(r_coef=r_coef, x=x) for key, (r_coef, x) in elements.items()
            }
        )


def disturbance_check(inst: SqrtInstrument, obs: ObservablePair) -> DisturbanceVerdict:
    """
    Check E_A D_B >= sin^2(theta) on the sequential joint POVM.

    The check only applies when both marginals of the induced POVM are smeared
    projective measurements; otherwise the deviation of the B marginal from n_B
    is reported.
    """

    povm = sequential_joint_povm(inst, obs)
    report = check_nonideal(povm, obs)
    bound = math.sin(obs.theta) ** 2

    if not report.conforming:
        logger.debug(
            "B marginal after eta=%.6g is %.3g rad off n_B", inst.eta, report.b.deviation
        )
        return DisturbanceVerdict(
            applicable=False, bound=bound, deviation_b=report.b.deviation
        )

    pair = accuracy_pair(povm, obs)
    verdict = error_product_check(pair)

    return DisturbanceVerdict(
        applicable=True,
        x_a=pair.x_a,
        x_b=pair.x_b,
        error_a=verdict.error_a,
        disturbance_b=verdict.error_b,
        product=verdict.product,
        bound=bound,
        satisfied=verdict.satisfied,
        infinite=verdict.infinite,
        deviation_b=report.b.deviation,
    )


def sequential_report(inst: SqrtInstrument, obs: ObservablePair) -> SequentialReport:
    povm = sequential_joint_povm(inst, obs)

    return SequentialReport(
        eta=inst.eta,
        theta=obs.theta,
        povm=JointPovmDocument.from_povm(povm),
        nonideal=check_nonideal(povm, obs),
        verdict=disturbance_check(inst, obs),
    )


def post_measurement_state(
    inst: SqrtInstrument, state: QubitState, outcome: Outcome
) -> PostMeasurementState:
    """
    The state right after the instrument reported `outcome`.

    Raises:
        InvalidParameter: If the outcome has probability 0.
    """

    unnormalised = sandwich(kraus_operator(inst, outcome), _state_operator(state))
    probability = 2.0 * unnormalised.r_coef

    if probability <= Config.TOLERANCE:
        raise InvalidParameter(
            f"outcome {outcome} has probability 0 on this state", probability=probability
        )

    with constraint_guard():
        updated = QubitState(r=unnormalised.x * (1.0 / unnormalised.r_coef))

    return PostMeasurementState(
        outcome=outcome, probability=min(probability, 1.0), state=updated
    )


def nonselective_update(inst: SqrtInstrument, state: QubitState) -> QubitState:
    """sum_i M(i) rho M(i), the state when the A outcome is discarded."""

    rho = _state_operator(state)
    parts = [sandwich(kraus_operator(inst, outcome), rho) for outcome in OUTCOMES]
    trace = 2.0 * math.fsum(part.r_coef for part in parts)

    with constraint_guard():
        return QubitState(r=(parts[0].x + parts[1].x) * (2.0 / trace))


class SequentialService:
    def report(self, obs: ObservablePair, eta: float) -> SequentialReport:
        """
        Measure A with sharpness `eta` by the square-root instrument, then B.

        Raises:
            ConstraintViolation: If `eta` lies outside [0, 1].
        """

        return sequential_report(instrument_for(obs, eta), obs)
