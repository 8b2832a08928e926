"""
This module contains test cases for the Bloch representation: the state, element
and POVM models, the exact probability rules and the JSON parsers.
"""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ConstraintViolation, MalformedInput
from src.bloch.schemas import BlochOperator, BlochVector, JointPovm, PovmElement, QubitState
from src.bloch.service import (
    density_matrix,
    dump_joint_povm,
    marginals,
    matrix_oracle,
    observable_pair_from_angle,
    outcome_distribution,
    outcome_probability,
    parse_joint_povm,
    parse_observables,
    parse_state,
    projector_element,
    projector_probability,
    sandwich,
)
from src.optimal.service import sample_valid_povm

Z = BlochVector(x=0.0, y=0.0, z=1.0)

coefficients = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
operators = st.builds(
    lambda r_coef, x, y, z: BlochOperator(r_coef=r_coef, x=BlochVector(x=x, y=y, z=z)),
    coefficients,
    coefficients,
    coefficients,
    coefficients,
)


def identity_povm() -> JointPovm:
    element = PovmElement(r_coef=0.25, x=BlochVector.zero())
    return JointPovm(elements={key: element for key in ("++", "+-", "-+", "--")})


def povm_from_vectors(vectors: dict[str, tuple[float, float, float]], r_coef: float = 0.25) -> JointPovm:
    return JointPovm(
        elements={
            key: PovmElement(r_coef=r_coef, x=BlochVector.from_array(vector))
            for key, vector in vectors.items()
        }
    )


def test_outcome_probability_examples():
    state = QubitState(r=BlochVector(x=0.0, y=0.0, z=0.6))
    element = PovmElement(r_coef=0.25, x=BlochVector(x=0.1, y=0.0, z=0.2))

    assert outcome_probability(state, element) == pytest.approx(0.37)
    assert outcome_probability(state, PovmElement(r_coef=0.25, x=BlochVector.zero())) == 0.25
    assert outcome_probability(QubitState(r=Z), projector_element(Z, "+")) == pytest.approx(1.0)


def test_projector_probability_examples():
    state = QubitState(r=BlochVector(x=0.0, y=0.0, z=0.6))

    assert projector_probability(QubitState.maximally_mixed(), Z, "+") == 0.5
    assert projector_probability(QubitState(r=Z), Z, "+") == 1.0
    assert projector_probability(state, Z, "-") == pytest.approx(0.2)


def test_projector_probability_rejects_non_unit_direction():
    with pytest.raises(ConstraintViolation) as exc_info:
        projector_probability(QubitState.maximally_mixed(), Z * 0.5, "+")

    assert exc_info.value.constraint == "unit direction"


def test_probabilities_match_dense_trace():
    """
    Test case comparing tr(rho E) computed in the Bloch form with the dense
    matrix product, on 10^5 random valid (state, element) pairs.

    Asserts:
        - The two agree to within 1e-12 on every pair.
    """

    rng = np.random.default_rng(20240501)

    for _ in range(100_000):
        r_coef = rng.uniform()
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        element = PovmElement(
            r_coef=r_coef,
            x=BlochVector.from_array(direction * rng.uniform() * min(r_coef, 1.0 - r_coef)),
        )
        polarization = rng.normal(size=3)
        polarization *= rng.uniform() / np.linalg.norm(polarization)
        state = QubitState(r=BlochVector.from_array(polarization))

        dense = np.trace(density_matrix(state) @ matrix_oracle(element)).real

        assert abs(outcome_probability(state, element) - dense) < 1e-12


def test_matrix_oracle_examples():
    """
    Test case for the dense form of a few operators.

    Asserts:
        - The pure state along z and I/4 have the expected matrices.
        - The spectrum of r I + x.sigma is r -/+ |x| and agrees with `eigenvalues`.
    """

    assert np.allclose(matrix_oracle(BlochOperator(r_coef=0.5, x=Z * 0.5)), np.diag([1.0, 0.0]))
    assert np.allclose(matrix_oracle(BlochOperator(r_coef=0.25, x=BlochVector.zero())), np.eye(2) / 4)

    element = BlochOperator(r_coef=0.3, x=BlochVector(x=0.1, y=0.1, z=0.1))
    eigenvalues = np.linalg.eigvalsh(matrix_oracle(element))

    assert eigenvalues == pytest.approx([0.3 - math.sqrt(0.03), 0.3 + math.sqrt(0.03)])
    assert element.eigenvalues() == pytest.approx(tuple(eigenvalues))


@given(operators, operators)
@settings(max_examples=300, deadline=None)
def test_sandwich_matches_dense_product(outer, inner):
    """
    Test case comparing the closed form of M X M with the dense product for
    random Hermitian operators.

    Args:
        outer (BlochOperator): The outer factor M.
        inner (BlochOperator): The inner factor X.

    Asserts:
        - Both forms agree entrywise within 1e-12.
    """

    dense_outer = matrix_oracle(outer)
    expected = dense_outer @ matrix_oracle(inner) @ dense_outer

    assert np.allclose(matrix_oracle(sandwich(outer, inner)), expected, atol=1e-12)


def test_marginals_examples(optimal_orthogonal):
    marginal_a, marginal_b = marginals(identity_povm())

    assert marginal_a.r_coef == pytest.approx(0.5)
    assert marginal_a.x.norm() == 0.0
    assert marginal_b.r_coef == pytest.approx(0.5)

    marginal_a, _ = marginals(optimal_orthogonal)
    assert marginal_a.x.as_array() == pytest.approx([0.0, 0.0, 1.0 / (2.0 * math.sqrt(2.0))])

    cancelling = povm_from_vectors(
        {"++": (0.1, 0, 0), "+-": (-0.1, 0, 0), "-+": (0, 0.1, 0), "--": (0, -0.1, 0)}
    )
    marginal_a, marginal_b = marginals(cancelling)

    assert marginal_a.x.norm() == pytest.approx(0.0)
    assert marginal_b.x.norm() == pytest.approx(0.1 * math.sqrt(2.0))


def test_outcome_distribution_sums_to_one(optimal_orthogonal):
    """
    Test case for the joint distribution of the optimal POVM at theta = pi/2.

    Args:
        optimal_orthogonal (JointPovm): Optimal POVM at theta = pi/2.

    Asserts:
        - The four probabilities sum to 1.
    """

    state = QubitState(r=BlochVector(x=0.3, y=-0.2, z=0.5))

    assert math.fsum(outcome_distribution(optimal_orthogonal, state).values()) == pytest.approx(1.0)


def test_random_outcome_distributions_sum_to_one(random_observables, random_state):
    """
    Test case for the joint distribution of 10^5 random valid (state, POVM) pairs.

    Args:
        random_observables (Callable): Observable-pair factory fixture.
        random_state (Callable): State factory fixture.

    Asserts:
        - Every q(i, j) lies in [0, 1].
        - The four probabilities sum to 1 within 1e-12.
    """

    rng = np.random.default_rng(11)

    for _ in range(200):
        povm = sample_valid_povm(random_observables(rng), rng)
        for _ in range(500):
            distribution = outcome_distribution(povm, random_state(rng))

            assert all(0.0 <= value <= 1.0 for value in distribution.values())
            assert math.fsum(distribution.values()) == pytest.approx(1.0, abs=1e-12)


def test_projector_probability_matches_projector_element(random_state):
    """
    Test case comparing the projective rule with the general rule applied to the
    projector (I +/- n.sigma)/2, for 10^5 random states and directions.

    Args:
        random_state (Callable): State factory fixture.

    Asserts:
        - projector_probability(state, n, s) equals
          outcome_probability(state, projector_element(n, s)) within 1e-12, for s = +, -.
    """

    rng = np.random.default_rng(12)

    for _ in range(100_000):
        state = random_state(rng)
        direction = BlochVector.from_array(rng.normal(size=3)).unit()
        for sign in ("+", "-"):
            assert projector_probability(state, direction, sign) == pytest.approx(
                outcome_probability(state, projector_element(direction, sign)), abs=1e-12
            )


def test_state_outside_bloch_ball_is_rejected():
    with pytest.raises(ConstraintViolation) as exc_info:
        parse_state(json.dumps({"r": [0.8, 0.8, 0.0]}))

    assert exc_info.value.constraint == "state positivity"


def test_povm_with_wrong_r_sum_is_rejected(optimal_orthogonal):
    document = dump_joint_povm(optimal_orthogonal)
    document["elements"][0]["r"] += 0.1

    with pytest.raises(ConstraintViolation) as exc_info:
        parse_joint_povm(json.dumps(document))

    assert exc_info.value.constraint == "sum of r coefficients"


def test_identity_povm_with_r_sum_above_one_is_rejected():
    elements = [
        {"i": i, "j": j, "r": 0.275, "x": [0.0, 0.0, 0.0]}
        for i, j in (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))
    ]

    with pytest.raises(ConstraintViolation) as exc_info:
        parse_joint_povm(json.dumps({"elements": elements}))

    assert exc_info.value.constraint == "sum of r coefficients"


def test_povm_element_exceeding_positivity_is_rejected():
    """
    Test case for a POVM with an element whose |x| exceeds its r coefficient.

    Asserts:
        - Parsing raises ConstraintViolation for the positivity of that element.
    """

    elements = [
        {"i": "+", "j": "+", "r": 0.25, "x": [0.0, 0.0, 0.3]},
        {"i": "+", "j": "-", "r": 0.25, "x": [0.0, 0.0, -0.3]},
        {"i": "-", "j": "+", "r": 0.25, "x": [0.0, 0.0, 0.0]},
        {"i": "-", "j": "-", "r": 0.25, "x": [0.0, 0.0, 0.0]},
    ]

    with pytest.raises(ConstraintViolation) as exc_info:
        parse_joint_povm(json.dumps({"elements": elements}))

    assert exc_info.value.constraint == "positivity"


def test_povm_with_nonzero_x_sum_is_rejected():
    with pytest.raises(ConstraintViolation) as exc_info:
        parse_joint_povm(
            json.dumps(
                {
                    "elements": [
                        {"i": "+", "j": "+", "r": 0.25, "x": [0.0, 0.0, 0.1]},
                        {"i": "+", "j": "-", "r": 0.25, "x": [0.0, 0.0, 0.0]},
                        {"i": "-", "j": "+", "r": 0.25, "x": [0.0, 0.0, 0.0]},
                        {"i": "-", "j": "-", "r": 0.25, "x": [0.0, 0.0, 0.0]},
                    ]
                }
            )
        )

    assert exc_info.value.constraint == "sum of x coefficients"


def test_truncated_json_is_malformed(optimal_orthogonal):
    text = json.dumps(dump_joint_povm(optimal_orthogonal))

    with pytest.raises(MalformedInput):
        parse_joint_povm(text[: len(text) // 2])


def test_missing_outcome_is_malformed(optimal_orthogonal):
    document = dump_joint_povm(optimal_orthogonal)
    document["elements"] = document["elements"][:3]

    with pytest.raises(MalformedInput):
        parse_joint_povm(json.dumps(document))


def test_vector_with_two_components_is_malformed():
    with pytest.raises(MalformedInput):
        parse_state(json.dumps({"r": [0.1, 0.2]}))


def test_povm_document_round_trip(optimal_orthogonal):
    assert parse_joint_povm(json.dumps(dump_joint_povm(optimal_orthogonal))) == optimal_orthogonal


def test_observables_parse_and_angle():
    obs = parse_observables(json.dumps({"n_a": [0, 0, 1], "n_b": [1, 0, 0]}))

    assert obs.theta == pytest.approx(math.pi / 2)
    assert observable_pair_from_angle(60.0, degrees=True).theta == pytest.approx(math.pi / 3)


@pytest.mark.parametrize(
    "document, constraint",
    [
        ({"n_a": [0, 0, 1], "n_b": [0, 0, -1]}, "noncollinear observables"),
        ({"n_a": [0, 0, 1], "n_b": [0, 0, 1]}, "noncollinear observables"),
        ({"n_a": [0, 0, 2], "n_b": [1, 0, 0]}, "unit direction"),
    ],
)
def test_degenerate_observables_are_rejected(document, constraint):
    """
    Test case for observable documents with parallel or non-unit axes.

    Args:
        document (dict): The observables document.
        constraint (str): The constraint expected to fail.

    Asserts:
        - Parsing raises ConstraintViolation naming `constraint`.
    """

    with pytest.raises(ConstraintViolation) as exc_info:
        parse_observables(json.dumps(document))

    assert exc_info.value.constraint == constraint
