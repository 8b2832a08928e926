"""
This module contains test cases for the channel view of nonideal joint measurements:
conformance of the marginals, the stochastic matrices F, the accuracy and error
parameters and the two trade-off checks.
"""

import math

import numpy as np
import pytest

from src.errors import InvalidParameter, NonidealConditionViolated
from src.bloch.schemas import BlochVector, JointPovm, PovmElement
from src.bloch.service import marginals, outcome_probability, projector_probability
from src.channel.schemas import AccuracyPair
from src.channel.service import (
    accuracy,
    accuracy_pair,
    accuracy_report,
    apply_channel,
    build_channel,
    check_nonideal,
    classify_marginal,
    error_param,
    error_product_check,
    tradeoff_check,
    unbiased_possible,
)
from src.optimal.service import optimal_povm, sample_valid_povm


def tilted_povm(angle: float, magnitude: float = 0.3) -> JointPovm:
    """A POVM whose A marginal is magnitude * (sin angle, 0, cos angle) and B marginal is 0."""

    half = BlochVector(x=math.sin(angle), y=0.0, z=math.cos(angle)) * (magnitude / 2.0)

    return JointPovm(
        elements={
            "++": PovmElement(r_coef=0.25, x=half),
            "+-": PovmElement(r_coef=0.25, x=half),
            "-+": PovmElement(r_coef=0.25, x=-half),
            "--": PovmElement(r_coef=0.25, x=-half),
        }
    )


def test_channel_examples(make_channel):
    assert np.array(make_channel(0.5, 0.5).f_matrix) == pytest.approx(np.array(((1.0, 0.0), (0.0, 1.0))))
    assert np.array(make_channel(0.5, 0.0).f_matrix) == pytest.approx(np.array(((0.5, 0.5), (0.5, 0.5))))

    channel = make_channel(0.5, 0.3)

    assert np.array(channel.f_matrix) == pytest.approx(np.array(((0.8, 0.2), (0.2, 0.8))))
    assert channel.det() == pytest.approx(0.6)


def test_antiparallel_marginal_flips_orientation(make_channel):
    """
    Test case for a marginal whose x points against the observable axis.

    Args:
        make_channel (Callable): Channel factory fixture.

    Asserts:
        - The orientation is -1 and the accuracy matches the parallel case.
    """

    channel = make_channel(0.5, 0.3, orientation=-1)

    assert channel.orientation == -1
    assert np.array(channel.f_matrix) == pytest.approx(np.array(((0.2, 0.8), (0.8, 0.2))))
    assert accuracy(channel) == pytest.approx(0.36)


def test_accuracy_examples(make_channel):
    assert accuracy(make_channel(0.5, 0.5)) == pytest.approx(1.0)
    assert accuracy(make_channel(0.5, 0.0)) == 0.0
    assert accuracy(make_channel(0.5, 0.3)) == pytest.approx(0.36)
    assert accuracy(make_channel(0.4, 0.3)) == pytest.approx(0.36)


@pytest.mark.parametrize("value, expected", [(1.0, 0.0), (0.5, 1.0), (2.0 / 3.0, 0.5)])
def test_error_param_examples(value, expected):
    assert error_param(value) == pytest.approx(expected)


def test_error_param_is_infinite_for_zero_accuracy():
    assert math.isinf(error_param(0.0))


def test_error_param_rejects_out_of_range_accuracy():
    with pytest.raises(InvalidParameter):
        error_param(1.5)


def test_check_nonideal_examples(sixty_degree_pair, orthogonal_pair):
    """
    Test case for the axis condition on an optimal, a tilted and a blind POVM.

    Args:
        sixty_degree_pair (ObservablePair): Observables at theta = pi/3.
        orthogonal_pair (ObservablePair): n_A = z, n_B = x.

    Asserts:
        - The optimal POVM conforms on both marginals.
        - A marginal tilted by 0.1 rad is nonconforming with deviation 0.1.
        - Marginals with x = 0 are uninformative, which counts as conforming.
    """

    report = check_nonideal(optimal_povm(sixty_degree_pair), sixty_degree_pair)

    assert report.conforming
    assert report.a.status == report.b.status == "conforming"

    tilted = check_nonideal(tilted_povm(0.1), orthogonal_pair)

    assert not tilted.conforming
    assert tilted.a.status == "nonconforming"
    assert tilted.a.deviation == pytest.approx(0.1)
    assert tilted.b.status == "uninformative"

    blind = check_nonideal(tilted_povm(0.0, magnitude=0.0), orthogonal_pair)

    assert blind.a.status == blind.b.status == "uninformative"
    assert blind.conforming


def test_build_channel_rejects_nonconforming_marginal(orthogonal_pair):
    with pytest.raises(NonidealConditionViolated) as exc_info:
        build_channel(tilted_povm(0.1), orthogonal_pair, "A")

    assert exc_info.value.observable == "A"
    assert exc_info.value.deviation == pytest.approx(0.1)


def test_build_channel_columns_are_stochastic(thirty_degree_pair):
    """
    Test case for the B channel of the optimal POVM at theta = pi/6.

    Args:
        thirty_degree_pair (ObservablePair): Observables at theta = pi/6.

    Asserts:
        - Both columns of F sum to 1.
        - |det F| equals 2|x|.
    """

    channel = build_channel(optimal_povm(thirty_degree_pair), thirty_degree_pair, "B")
    (f_pp, f_pm), (f_mp, f_mm) = channel.f_matrix

    assert f_pp + f_mp == pytest.approx(1.0)
    assert f_pm + f_mm == pytest.approx(1.0)
    assert abs(channel.det()) == pytest.approx(2.0 * channel.x_norm)


def test_tradeoff_examples():
    projective_a = tradeoff_check(AccuracyPair(x_a=1.0, x_b=0.0, theta=1.0))

    assert projective_a.satisfied
    assert projective_a.slack == pytest.approx(0.0)

    optimum = tradeoff_check(AccuracyPair(x_a=2.0 / 3.0, x_b=2.0 / 3.0, theta=math.pi / 6))

    assert optimum.satisfied
    assert optimum.slack == pytest.approx(0.0, abs=1e-12)

    double_projective = tradeoff_check(AccuracyPair(x_a=1.0, x_b=1.0, theta=math.pi / 3))

    assert not double_projective.satisfied
    assert double_projective.excess == pytest.approx(0.75)


def test_error_product_examples():
    orthogonal = error_product_check(AccuracyPair.from_errors(1.0, 1.0, math.pi / 2))

    assert orthogonal.satisfied
    assert orthogonal.product == pytest.approx(orthogonal.bound)

    assert error_product_check(AccuracyPair.from_errors(2.0, 1.0, math.pi / 6)).satisfied
    assert not error_product_check(AccuracyPair.from_errors(0.1, 0.1, math.pi / 2)).satisfied


def test_error_product_with_uninformative_marginal_is_trivially_satisfied():
    verdict = error_product_check(AccuracyPair.from_errors(math.inf, 0.5, math.pi / 4))

    assert verdict.satisfied
    assert verdict.infinite
    assert math.isinf(verdict.product)


def test_tradeoff_and_error_product_verdicts_agree():
    """
    Test case checking that the trade-off and error-product verdicts agree on
    random accuracy pairs away from the boundary.

    Asserts:
        - Both verdicts are equal wherever |X_A + X_B - X_A X_B cos^2 - 1| > 1e-9.
    """

    rng = np.random.default_rng(7)
    checked = 0

    for x_a, x_b, theta in zip(
        rng.uniform(1e-6, 1.0, 10_000),
        rng.uniform(1e-6, 1.0, 10_000),
        rng.uniform(0.01, math.pi - 0.01, 10_000),
    ):
        pair = AccuracyPair(x_a=x_a, x_b=x_b, theta=theta)
        verdict = tradeoff_check(pair)
        if abs(verdict.value - 1.0) <= 1e-9:
            continue

        assert error_product_check(pair).satisfied == verdict.satisfied
        checked += 1

    assert checked > 9_000


def test_classify_marginal_examples(make_channel):
    assert classify_marginal(make_channel(0.5, 0.5)) == "projective"
    assert classify_marginal(make_channel(0.5, 0.0)) == "uninformative"
    assert classify_marginal(make_channel(0.5, 0.3)) == "intermediate"


def test_apply_channel(make_channel):
    assert apply_channel(make_channel(0.5, 0.5), 0.7)["+"] == pytest.approx(0.7)
    assert apply_channel(make_channel(0.5, 0.3), 0.5)["+"] == pytest.approx(0.5)
    assert apply_channel(make_channel(0.5, 0.3), 1.0)["+"] == pytest.approx(0.8)
    assert apply_channel(make_channel(0.5, 0.3, orientation=-1), 1.0)["+"] == pytest.approx(0.2)

    with pytest.raises(InvalidParameter):
        apply_channel(make_channel(0.5, 0.3), 1.2)


def test_channel_maps_projective_to_marginal_distribution(random_observables, random_state):
    """
    Test case for q = F p on 10^5 random (state, POVM) pairs: 200 random valid
    POVMs over random observable pairs, each measured on 500 random states.

    Args:
        random_observables (Callable): Observable-pair factory fixture.
        random_state (Callable): State factory fixture.

    Asserts:
        - For A and B, F applied to the projective probability of the observable
          reproduces the marginal's outcome probability to 1e-12.
    """

    rng = np.random.default_rng(31)

    for _ in range(200):
        obs = random_observables(rng)
        povm = sample_valid_povm(obs, rng)
        elements = dict(zip(("A", "B"), marginals(povm)))
        channels = {which: build_channel(povm, obs, which) for which in ("A", "B")}

        for _ in range(500):
            state = random_state(rng)
            for which in ("A", "B"):
                p_plus = projector_probability(state, obs.direction(which), "+")

                assert apply_channel(channels[which], p_plus)["+"] == pytest.approx(
                    outcome_probability(state, elements[which]), abs=1e-12
                )


def test_optimal_povm_is_never_unbiased(thirty_degree_pair):
    assert not unbiased_possible(optimal_povm(thirty_degree_pair), thirty_degree_pair)


def test_accuracy_report_at_optimum(thirty_degree_pair):
    """
    Test case for the accuracy report of the optimal POVM at theta = pi/6.

    Asserts:
        - Both accuracies equal 2/3.
        - Both trade-off checks are satisfied with zero slack.
        - Errors are 1/2 and the marginals are intermediate.
    """

    povm = optimal_povm(thirty_degree_pair)
    report = accuracy_report(povm, thirty_degree_pair)

    assert report.accuracies.x_a == pytest.approx(2.0 / 3.0)
    assert report.accuracies.x_b == pytest.approx(2.0 / 3.0)
    assert report.tradeoff.satisfied
    assert report.tradeoff.slack == pytest.approx(0.0, abs=1e-12)
    assert report.error_product.satisfied
    assert report.a.error == pytest.approx(0.5)
    assert report.b.classification == "intermediate"
    assert not report.unbiased_possible
    assert accuracy_pair(povm, thirty_degree_pair) == report.accuracies
