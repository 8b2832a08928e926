"""
Exact probability rules and operator algebra in the Bloch representation.

All functions are pure; `PovmService` wraps them for the routes and the CLI.
The dense 2x2 complex form of an operator is only produced by `matrix_oracle`
and `density_matrix`, which serve as an independent check on the real-vector
arithmetic used everywhere else.
"""

import json
import math
from typing import Any

import numpy as np
from pydantic import ValidationError

from src.config import Config
from src.errors import ConstraintViolation, MalformedInput
from src.bloch.schemas import (
    OUTCOME_PAIRS,
    SIGN,
    BlochOperator,
    BlochVector,
    JointPovm,
    JointPovmDocument,
    ObservablePair,
    Outcome,
    OutcomePair,
    PovmElement,
    ProbabilityReport,
    ProbabilityRequest,
    QubitState,
    StateDocument,
    constraint_guard,
    translate_validation_error,
)

IDENTITY = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _clamp_probability(value: float, constraint: str) -> float:
    tolerance = Config.TOLERANCE
    if value < -tolerance or value > 1.0 + tolerance:
        raise ConstraintViolation(constraint, detail=f"probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def outcome_probability(state: QubitState, element: BlochOperator) -> float:
    """
    Probability tr(rho E) = r_coef + x.r of observing the outcome of `element`.

    Args:
        state (QubitState): The measured state.
        element (BlochOperator): A POVM element (or a marginal element).

    Returns:
        float: The probability, clamped to [0, 1] after the tolerance window.

    Raises:
        ConstraintViolation: If the value leaves [-tol, 1 + tol], which means
            the element is not a valid effect for this state.
    """

    return _clamp_probability(
        element.r_coef + element.x.dot(state.r), "probability range"
    )


def projector_probability(
    state: QubitState, direction: BlochVector, sign: Outcome
) -> float:
    """
    Probability (1 +/- n.r)/2 of the projective outcome `sign` along `direction`.

    Raises:
        ConstraintViolation: If `direction` is not a unit vector.
    """

    if not direction.is_unit():
        raise ConstraintViolation(
            "unit direction", detail=f"|n| = {direction.norm()!r}"
        )

    return _clamp_probability(
        (1.0 + SIGN[sign] * direction.dot(state.r)) / 2.0, "probability range"
    )


def projector_element(direction: BlochVector, sign: Outcome) -> PovmElement:
    """The projector (I +/- n.sigma)/2 as a POVM element."""

    with constraint_guard():
        return PovmElement(r_coef=0.5, x=direction * (0.5 * SIGN[sign]))


def outcome_distribution(povm: JointPovm, state: QubitState) -> dict[OutcomePair, float]:
    """The joint distribution q(i, j) of all four outcomes."""

    return {key: outcome_probability(state, povm.elements[key]) for key in OUTCOME_PAIRS}


def marginals(povm: JointPovm) -> tuple[PovmElement, PovmElement]:
    """
    The marginal elements E_A(+) and E_B(+) of a joint POVM.

    E_A(+) = E(+,+) + E(+,-) and E_B(+) = E(+,+) + E(-,+); the "-" marginal
    elements are I - E(+).

    Returns:
        tuple[PovmElement, PovmElement]: (E_A(+), E_B(+)).
    """

    plus_plus = povm.element("+", "+")
    plus_minus = povm.element("+", "-")
    minus_plus = povm.element("-", "+")

    with constraint_guard():
        marginal_a = PovmElement(
            r_coef=plus_plus.r_coef + plus_minus.r_coef, x=plus_plus.x + plus_minus.x
        )
        marginal_b = PovmElement(
            r_coef=plus_plus.r_coef + minus_plus.r_coef, x=plus_plus.x + minus_plus.x
        )

    return marginal_a, marginal_b


def marginal_distribution(element_plus: BlochOperator, state: QubitState) -> dict[Outcome, float]:
    """Outcome probabilities of the two-outcome measurement {E(+), I - E(+)}."""

    q_plus = outcome_probability(state, element_plus)
    return {"+": q_plus, "-": 1.0 - q_plus}


def sandwich(outer: BlochOperator, inner: BlochOperator) -> BlochOperator:
    """
    The Hermitian product M X M for Hermitian M = a I + m.sigma and X = c I + v.sigma.

    M X M = (c (a^2 + |m|^2) + 2 a m.v) I + (2 a c m + 2 (m.v) m + (a^2 - |m|^2) v).sigma
    """

    a, m = outer.r_coef, outer.x
    c, v = inner.r_coef, inner.x
    m_dot_v = m.dot(v)
    m_squared = m.dot(m)

    return BlochOperator(
        r_coef=c * (a * a + m_squared) + 2.0 * a * m_dot_v,
        x=m * (2.0 * a * c + 2.0 * m_dot_v) + v * (a * a - m_squared),
    )


def matrix_oracle(element: BlochOperator) -> np.ndarray:
    """
    The dense complex matrix r_coef*I + x.sigma.

    Returns:
        np.ndarray: A 2x2 complex array.
    """

    x = element.x
    return element.r_coef * IDENTITY + x.x * PAULI[0] + x.y * PAULI[1] + x.z * PAULI[2]


def density_matrix(state: QubitState) -> np.ndarray:
    """The dense density matrix (I + r.sigma)/2."""

    return matrix_oracle(BlochOperator(r_coef=0.5, x=state.r * 0.5))


def observable_pair_from_angle(theta: float, degrees: bool = False) -> ObservablePair:
    """
    The canonical observable pair n_A = z, n_B = (sin theta, 0, cos theta).

    Args:
        theta (float): Angle between the observables.
        degrees (bool): Interpret `theta` in degrees instead of radians.
    """

    if degrees:
        theta = math.radians(theta)

    with constraint_guard():
        return ObservablePair(
            n_a=BlochVector(x=0.0, y=0.0, z=1.0),
            n_b=BlochVector(x=math.sin(theta), y=0.0, z=math.cos(theta)),
        )


def load_json(text: str) -> Any:
    """Decode JSON text, reporting decode failures as malformed input."""

    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc


def validate_document(model, data: Any):
    """Validate decoded JSON against a document model."""

    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise translate_validation_error(exc) from exc


def povm_from_document(document: JointPovmDocument) -> JointPovm:
    with constraint_guard():
        return document.to_povm()


def parse_joint_povm(text: str) -> JointPovm:
    """Parse a joint POVM document, checking every invariant."""

    return povm_from_document(validate_document(JointPovmDocument, load_json(text)))


def parse_observables(text: str) -> ObservablePair:
    """Parse {"n_a": [...], "n_b": [...]}."""

    return validate_document(ObservablePair, load_json(text))


def parse_state(text: str) -> QubitState:
    """Parse {"r": [...]}."""

    document = validate_document(StateDocument, load_json(text))

    with constraint_guard():
        return QubitState(r=document.r)


def dump_joint_povm(povm: JointPovm) -> dict[str, Any]:
    """The JSON-ready document of a joint POVM."""

    return JointPovmDocument.from_povm(povm).model_dump()


def probability_report(povm: JointPovm, state: QubitState) -> ProbabilityReport:
    marginal_a, marginal_b = marginals(povm)

    return ProbabilityReport(
        joint=outcome_distribution(povm, state),
        marginal_a=marginal_distribution(marginal_a, state),
        marginal_b=marginal_distribution(marginal_b, state),
    )


class PovmService:
    """
    Request-level operations on joint POVMs, shared by the HTTP routes and the
    command line.
    """

    def load_povm(self, document: JointPovmDocument) -> JointPovm:
        """
        Build a joint POVM from its document.

        Raises:
            ConstraintViolation: If the elements break a joint-POVM invariant.
        """

        return povm_from_document(document)

    def read_povm(self, text: str) -> JointPovm:
        return parse_joint_povm(text)

    def read_observables(self, text: str) -> ObservablePair:
        return parse_observables(text)

    def read_state(self, text: str) -> QubitState:
        return parse_state(text)

    def observables_at(self, theta: float, degrees: bool = False) -> ObservablePair:
        return observable_pair_from_angle(theta, degrees=degrees)

    def probabilities(self, request: ProbabilityRequest) -> ProbabilityReport:
        """
        Joint and marginal outcome probabilities of a POVM document on a state document.

        Args:
            request (ProbabilityRequest): The POVM and the state.

        Returns:
            ProbabilityReport: q(i, j) and both marginal distributions.

        Raises:
            ConstraintViolation: If the POVM or the state is invalid.
        """

        povm = self.load_povm(request.povm)

        with constraint_guard():
            state = QubitState(r=request.state.r)

        return probability_report(povm, state)
