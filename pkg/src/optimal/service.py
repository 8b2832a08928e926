"""
The optimal joint measurement, random valid joint measurements, and the
numerical map of the accessible accuracy region.

A nonideal joint POVM with marginal vectors x_A = a n_A and x_B = b n_B is fixed
by the free vector x_{++}:

    x_{+-} = x_A - x_{++},  x_{-+} = x_B - x_{++},  x_{--} = x_{++} - x_A - x_B,

and exists iff the four coefficient vectors satisfy sum |x_ij| <= 1; the
remaining weight 1 - sum |x_ij| is spread over the r_ij. The sum is smallest at
x_{++} = (x_A + x_B)/2, where it equals |x_A + x_B| + |x_A - x_B|.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from src.config import Config
from src.errors import InfeasibleMagnitudes, InvalidParameter
from src.logger import get_logger
from src.utils import derive_rng, ordered_map
from src.bloch.schemas import (
    OUTCOME_PAIRS,
    BlochVector,
    JointPovm,
    JointPovmDocument,
    ObservablePair,
    PovmElement,
    constraint_guard,
)
from src.channel.schemas import AccuracyPair
from src.channel.service import accuracy_pair, error_product_check, tradeoff_check
from src.optimal.schemas import (
    BoundaryPoint,
    FuzzReport,
    OptimalReport,
    Region,
    RegionPoint,
    SweepReport,
    TradeoffReport,
)

logger = get_logger("optimal")

MIN_WITNESS_MAGNITUDE = 1e-6


def optimal_povm(obs: ObservablePair) -> JointPovm:
    """
    The joint POVM reaching equality in the accuracy trade-off with X_A = X_B.

    E(i, j) = |x_ij| I + x_ij.sigma with x_{++} = r (n_A + n_B), x_{+-} = r (n_A - n_B),
    x_{-+} = -x_{+-}, x_{--} = -x_{++} and r = 1 / (2 (|n_A + n_B| + |n_A - n_B|)).
    Each element is proportional to a projector; the two projection axes
    n_A + n_B and n_A - n_B are orthogonal.
    """

    n_sum = obs.n_a + obs.n_b
    n_diff = obs.n_a - obs.n_b
    r = 1.0 / (2.0 * (n_sum.norm() + n_diff.norm()))

    vectors = {
        "++": n_sum * r,
        "+-": n_diff * r,
        "-+": n_diff * -r,
        "--": n_sum * -r,
    }

    with constraint_guard():
        return JointPovm(
            elements={
                key: PovmElement(r_coef=vector.norm(), x=vector)
                for key, vector in vectors.items()
            }
        )


def optimal_accuracy(theta: float) -> float:
    """Closed form 1 / (1 + sin theta) of the optimal accuracy."""

    return 1.0 / (1.0 + math.sin(theta))


def boundary_curve(theta: float, x_a: float) -> float:
    """
    Largest X_B compatible with X_A = x_a: (1 - x_a) / (1 - x_a cos^2 theta).

    Raises:
        InvalidParameter: If x_a is outside [0, 1] or x_a cos^2 theta >= 1.
    """

    if not 0.0 <= x_a <= 1.0 + Config.TOLERANCE:
        raise InvalidParameter("x_a must lie in [0, 1]", x_a=x_a)

    denominator = 1.0 - x_a * math.cos(theta) ** 2
    if denominator <= 0.0:
        raise InvalidParameter("x_a cos^2(theta) must be below 1", x_a=x_a, theta=theta)

    return max((1.0 - x_a) / denominator, 0.0)


def classify_region(pair: AccuracyPair) -> Region:
    """
    Domain of an accuracy pair: "P" (reachable by splitting the sample),
    "Q" (reachable only by simultaneous measurement) or "inaccessible".
    """

    if not tradeoff_check(pair).satisfied:
        return "inaccessible"
    if pair.x_a + pair.x_b <= 1.0 + Config.TOLERANCE:
        return "P"

    return "Q"


def boundary_point(theta: float, x_a: float) -> BoundaryPoint:
    return BoundaryPoint(theta=theta, x_a=x_a, x_b=boundary_curve(theta, x_a))


def tradeoff_report(pair: AccuracyPair) -> TradeoffReport:
    return TradeoffReport(
        accuracies=pair,
        tradeoff=tradeoff_check(pair),
        error_product=error_product_check(pair),
        region=classify_region(pair),
    )


def optimal_report(obs: ObservablePair) -> OptimalReport:
    povm = optimal_povm(obs)
    pair = accuracy_pair(povm, obs)

    return OptimalReport(
        theta=obs.theta,
        povm=JointPovmDocument.from_povm(povm),
        accuracies=pair,
        closed_form=optimal_accuracy(obs.theta),
        tradeoff=tradeoff_check(pair),
        region=classify_region(pair),
    )


def _coefficient_vectors(x_a: np.ndarray, x_b: np.ndarray, x_pp: np.ndarray) -> np.ndarray:
    """The vectors x_ij in OUTCOME_PAIRS order, stacked on the second-to-last axis."""

    return np.stack([x_pp, x_a - x_pp, x_b - x_pp, x_pp - x_a - x_b], axis=-2)


def _total_norm(x_a: np.ndarray, x_b: np.ndarray, x_pp: np.ndarray) -> float:
    return float(np.linalg.norm(_coefficient_vectors(x_a, x_b, x_pp), axis=-1).sum())


def _random_in_ball(
    rng: np.random.Generator, radius: np.ndarray | float, size: int | None = None
) -> np.ndarray:
    """Uniform points in balls of the given radius; one point when `size` is None."""

    if size is None:
        direction = rng.normal(size=3)
        return direction / np.linalg.norm(direction) * radius * rng.uniform() ** (1.0 / 3.0)

    direction = rng.normal(size=(size, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    scale = np.asarray(radius) * rng.uniform(size=size) ** (1.0 / 3.0)

    return direction * scale[:, None]


def _assemble_povm(
    x_a: np.ndarray, x_b: np.ndarray, x_pp: np.ndarray, rng: np.random.Generator
) -> JointPovm | None:
    """
    Complete (x_A, x_B, x_{++}) into a joint POVM, or None when sum |x_ij| > 1.

    The spare weight 1 - sum |x_ij| goes to the r_ij in proportions drawn from a
    flat Dirichlet distribution.
    """

    vectors = _coefficient_vectors(x_a, x_b, x_pp)
    norms = np.linalg.norm(vectors, axis=-1)
    total = float(norms.sum())

    if total > 1.0 + Config.TOLERANCE:
        return None

    spare = max(1.0 - total, 0.0)
    r_coefs = norms + spare * rng.dirichlet(np.ones(4))

    with constraint_guard():
        return JointPovm(
            elements={
                key: PovmElement(r_coef=float(r_coef), x=BlochVector.from_array(vector))
                for key, r_coef, vector in zip(OUTCOME_PAIRS, r_coefs, vectors)
            }
        )


def sample_valid_povm(
    obs: ObservablePair,
    rng_seed: int | np.random.Generator,
    magnitudes: tuple[float, float] | None = None,
    max_retries: int | None = None,
) -> JointPovm:
    """
    Draw a random valid nonideal joint POVM with x_A = a n_A and x_B = b n_B.

    Args:
        obs (ObservablePair): The observables.
        rng_seed (int | np.random.Generator): Seed, or a generator to draw from.
        magnitudes (tuple[float, float] | None): Fixed (a, b) in [0, 1/2]; sampled
            uniformly (and resampled until feasible) when None.
        max_retries (int | None): Attempts before giving up; `Config.SAMPLER_MAX_RETRIES` by default.

    Returns:
        JointPovm: A POVM satisfying every joint-POVM constraint.

    Raises:
        InfeasibleMagnitudes: If no attempt produced a POVM.
    """

    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else derive_rng(rng_seed)
    max_retries = Config.SAMPLER_MAX_RETRIES if max_retries is None else max_retries

    if magnitudes is not None:
        for magnitude in magnitudes:
            if not 0.0 <= magnitude <= 0.5:
                raise InvalidParameter("marginal magnitudes must lie in [0, 1/2]", magnitude=magnitude)

    n_a, n_b = obs.n_a.as_array(), obs.n_b.as_array()

    for attempt in range(max_retries):
        a, b = magnitudes if magnitudes is not None else rng.uniform(0.0, 0.5, size=2)
        a = 0.0 if a < MIN_WITNESS_MAGNITUDE else a
        b = 0.0 if b < MIN_WITNESS_MAGNITUDE else b
        x_a, x_b = a * n_a, b * n_b
        spare = 1.0 - np.linalg.norm(x_a + x_b) - np.linalg.norm(x_a - x_b)
        x_pp = (x_a + x_b) / 2.0 + _random_in_ball(rng, max(spare, 0.0) / 2.0)

        povm = _assemble_povm(x_a, x_b, x_pp, rng)
        if povm is not None:
            return povm

        logger.debug("sampler attempt %d rejected (a=%.6g, b=%.6g)", attempt, a, b)

    raise InfeasibleMagnitudes(
        f"no joint POVM found after {max_retries} attempts",
        magnitudes=list(magnitudes) if magnitudes is not None else None,
    )


def fuzz_tradeoff(cases: int, rng_seed: int, chunk_size: int = 100_000) -> FuzzReport:
    """
    Check the accuracy trade-off on `cases` random valid nonideal joint POVMs.

    This is `sample_valid_povm` vectorised over random angles in (0, pi) and
    random orientations of the observable pair. Each sample is checked against
    the joint-POVM constraints, the axis condition of both marginals, the
    trade-off inequality, the triangle-inequality step
    |x_A + x_B| + |x_A - x_B| <= 1, and the agreement between the trade-off and
    error-product verdicts.
    """

    if cases < 1:
        raise InvalidParameter("cases must be at least 1", cases=cases)

    rng = derive_rng(rng_seed)
    tolerance = Config.TOLERANCE
    counts = dict.fromkeys(
        (
            "invalid_povms",
            "nonconforming",
            "tradeoff_violations",
            "triangle_violations",
            "verdict_mismatches",
            "double_projective",
        ),
        0,
    )
    max_value = -math.inf

    for start in range(0, cases, chunk_size):
        size = min(chunk_size, cases - start)

        n_a = rng.normal(size=(size, 3))
        n_a /= np.linalg.norm(n_a, axis=1, keepdims=True)
        perpendicular = rng.normal(size=(size, 3))
        perpendicular -= np.sum(perpendicular * n_a, axis=1, keepdims=True) * n_a
        perpendicular /= np.linalg.norm(perpendicular, axis=1, keepdims=True)
        theta = rng.uniform(1e-6, math.pi - 1e-6, size=size)
        n_b = np.cos(theta)[:, None] * n_a + np.sin(theta)[:, None] * perpendicular

        magnitudes = rng.uniform(0.0, 0.5, size=(size, 2))
        while True:
            # below this, rounding in x_{++} + x_{+-} would tilt a marginal off its axis
            magnitudes[magnitudes < MIN_WITNESS_MAGNITUDE] = 0.0
            x_a = magnitudes[:, :1] * n_a
            x_b = magnitudes[:, 1:] * n_b
            spare = (
                1.0
                - np.linalg.norm(x_a + x_b, axis=1)
                - np.linalg.norm(x_a - x_b, axis=1)
            )
            infeasible = spare < 0.0
            if not infeasible.any():
                break
            magnitudes[infeasible] = rng.uniform(0.0, 0.5, size=(int(infeasible.sum()), 2))

        offsets = _random_in_ball(rng, spare / 2.0, size=size)
        while True:
            vectors = _coefficient_vectors(x_a, x_b, (x_a + x_b) / 2.0 + offsets)
            norms = np.linalg.norm(vectors, axis=-1)
            total = norms.sum(axis=1)
            rejected = total > 1.0 + tolerance / 2.0
            if not rejected.any():
                break
            offsets[rejected] = _random_in_ball(
                rng, spare[rejected] / 2.0, size=int(rejected.sum())
            )

        r_coefs = norms + np.clip(1.0 - total, 0.0, None)[:, None] * rng.dirichlet(
            np.ones(4), size=size
        )

        invalid = (
            (np.abs(r_coefs.sum(axis=1) - 1.0) > tolerance)
            | (np.linalg.norm(vectors.sum(axis=1), axis=1) > tolerance)
            | np.any(norms > r_coefs + tolerance, axis=1)
            | np.any(r_coefs + norms > 1.0 + tolerance, axis=1)
        )

        marginal_a = vectors[:, 0] + vectors[:, 1]
        marginal_b = vectors[:, 0] + vectors[:, 2]
        norm_a = np.linalg.norm(marginal_a, axis=1)
        norm_b = np.linalg.norm(marginal_b, axis=1)
        deviation_a = np.arctan2(
            np.linalg.norm(np.cross(marginal_a, n_a), axis=1),
            np.abs(np.sum(marginal_a * n_a, axis=1)),
        )
        deviation_b = np.arctan2(
            np.linalg.norm(np.cross(marginal_b, n_b), axis=1),
            np.abs(np.sum(marginal_b * n_b, axis=1)),
        )
        nonconforming = (
            (norm_a >= tolerance) & (deviation_a >= Config.PARALLEL_TOLERANCE)
        ) | ((norm_b >= tolerance) & (deviation_b >= Config.PARALLEL_TOLERANCE))

        accuracy_a = np.minimum(4.0 * norm_a**2, 1.0)
        accuracy_b = np.minimum(4.0 * norm_b**2, 1.0)
        value = accuracy_a + accuracy_b - accuracy_a * accuracy_b * np.cos(theta) ** 2
        satisfied = value <= 1.0 + tolerance

        triangle = (
            np.linalg.norm(marginal_a + marginal_b, axis=1)
            + np.linalg.norm(marginal_a - marginal_b, axis=1)
        ) > 1.0 + tolerance

        positive = (accuracy_a > 0.0) & (accuracy_b > 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            product = (1.0 / accuracy_a - 1.0) * (1.0 / accuracy_b - 1.0)
            product_satisfied = product >= np.sin(theta) ** 2 - tolerance / (
                accuracy_a * accuracy_b
            )
        mismatched = positive & (product_satisfied != satisfied)

        counts["invalid_povms"] += int(invalid.sum())
        counts["nonconforming"] += int(nonconforming.sum())
        counts["tradeoff_violations"] += int((~satisfied).sum())
        counts["triangle_violations"] += int(triangle.sum())
        counts["verdict_mismatches"] += int(mismatched.sum())
        counts["double_projective"] += int(
            ((accuracy_a >= 1.0 - tolerance) & (accuracy_b >= 1.0 - tolerance)).sum()
        )
        max_value = max(max_value, float(value.max()))

        logger.debug("fuzzed %d/%d cases", start + size, cases)

    return FuzzReport(cases=cases, seed=rng_seed, max_tradeoff_value=max_value, **counts)


class _SweepTask(NamedTuple):
    index: int
    x_a_target: float
    obs: ObservablePair
    seed: int
    restarts: int
    penalty: float
    keep_witness: bool


def _largest_feasible_b(x_a: np.ndarray, n_b: np.ndarray, x_pp: np.ndarray) -> float | None:
    """
    Largest b in [0, 1/2] with sum |x_ij| <= 1 at fixed x_{++}, or None.

    The sum is convex in b, so its feasible set is an interval; Brent's method
    finds the upper end.
    """

    threshold = 1.0 + Config.TOLERANCE / 2.0

    def excess(b: float) -> float:
        return _total_norm(x_a, b * n_b, x_pp) - threshold

    lowest = minimize_scalar(
        excess, bounds=(0.0, 0.5), method="bounded", options={"xatol": 1e-12}
    )
    b_low = min((0.0, float(lowest.x)), key=excess)
    if excess(b_low) > 0.0:
        return None
    if excess(0.5) <= 0.0:
        return 0.5

    return float(brentq(excess, b_low, 0.5, xtol=1e-15))


def _sweep_point(task: _SweepTask) -> RegionPoint:
    """
    Maximise X_B at X_A = target by multi-start Nelder-Mead over (b, x_{++}).

    Each start minimises -X_B + penalty * max(0, sum |x_ij| - 1), refines x_{++}
    at the resulting b, and then extends b as far as that x_{++} allows. The
    reported accuracies are measured from the assembled witness POVM.
    """

    rng = derive_rng(task.seed, task.index)
    obs = task.obs
    n_a, n_b = obs.n_a.as_array(), obs.n_b.as_array()
    x_a = math.sqrt(task.x_a_target) / 2.0 * n_a

    def penalised(z: np.ndarray) -> float:
        b = 0.5 * math.sin(z[0]) ** 2
        excess = _total_norm(x_a, b * n_b, z[1:]) - 1.0
        return -4.0 * b * b + task.penalty * max(excess, 0.0)

    best_b, best_x_pp = None, None

    for _ in range(task.restarts):
        start = np.concatenate(
            [rng.uniform(0.0, math.pi / 2.0, size=1), rng.uniform(-0.5, 0.5, size=3)]
        )
        coarse = minimize(
            penalised,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000},
        )
        b_coarse = 0.5 * math.sin(coarse.x[0]) ** 2
        refined = minimize(
            lambda x_pp: _total_norm(x_a, b_coarse * n_b, x_pp),
            coarse.x[1:],
            method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 6000},
        )

        b_found = _largest_feasible_b(x_a, n_b, refined.x)
        if b_found is not None and (best_b is None or b_found > best_b):
            best_b, best_x_pp = b_found, refined.x

    if best_b is None:
        logger.warning(
            "no feasible start at X_A = %.6g; reporting the B-blind witness",
            task.x_a_target,
        )
        best_b, best_x_pp = 0.0, x_a / 2.0

    # below this, rounding in x_{++} + x_{-+} would tilt x_B off its axis
    if best_b < MIN_WITNESS_MAGNITUDE:
        best_b = 0.0

    witness = _assemble_povm(x_a, best_b * n_b, best_x_pp, rng)
    if witness is None:
        witness = _assemble_povm(x_a, np.zeros(3), x_a / 2.0, rng)

    pair = accuracy_pair(witness, obs)
    boundary = boundary_curve(obs.theta, min(pair.x_a, 1.0))

    logger.debug(
        "point %d: X_A=%.6g X_B=%.12g boundary=%.12g",
        task.index,
        pair.x_a,
        pair.x_b,
        boundary,
    )

    with constraint_guard():
        return RegionPoint(
            index=task.index,
            theta=obs.theta,
            x_a_target=task.x_a_target,
            x_a=pair.x_a,
            x_b=pair.x_b,
            x_b_boundary=boundary,
            gap=boundary - pair.x_b,
            achieved_by=witness if task.keep_witness else None,
        )


def region_sweep(
    obs: ObservablePair,
    grid_size: int | None = None,
    rng_seed: int = 0,
    restarts: int | None = None,
    workers: int | None = None,
    keep_witnesses: bool = True,
) -> SweepReport:
    """
    Map the frontier of the accessible accuracy region numerically.

    Args:
        obs (ObservablePair): The observables.
        grid_size (int | None): Targets X_A evenly spaced on [0, 1] (at least 2).
        rng_seed (int): Master seed; point i draws from the stream (seed, i), so
            the result does not depend on `workers`.
        restarts (int | None): Nelder-Mead starts per point.
        workers (int | None): Process-pool width.
        keep_witnesses (bool): Attach each point's witness POVM.

    Returns:
        SweepReport: Achieved frontier with the analytic boundary alongside.
    """

    grid_size = Config.SWEEP_GRID_SIZE if grid_size is None else grid_size
    restarts = Config.SWEEP_RESTARTS if restarts is None else restarts
    workers = Config.WORKERS if workers is None else workers

    if grid_size < 2:
        raise InvalidParameter("grid_size must be at least 2", grid_size=grid_size)
    if restarts < 1:
        raise InvalidParameter("restarts must be at least 1", restarts=restarts)

    tasks = [
        _SweepTask(
            index=index,
            x_a_target=float(target),
            obs=obs,
            seed=rng_seed,
            restarts=restarts,
            penalty=Config.SWEEP_PENALTY,
            keep_witness=keep_witnesses,
        )
        for index, target in enumerate(np.linspace(0.0, 1.0, grid_size))
    ]

    logger.info("sweeping %d points at theta=%.6g with %d worker(s)", grid_size, obs.theta, workers)
    points = ordered_map(_sweep_point, tasks, workers=workers)
    exceeded = sum(point.gap < -Config.FRONTIER_TOLERANCE for point in points)

    if exceeded:
        logger.warning("%d sweep point(s) lie above the analytic boundary", exceeded)

    return SweepReport(
        theta=obs.theta,
        grid_size=grid_size,
        seed=rng_seed,
        restarts=restarts,
        points=points,
        max_gap=max(point.gap for point in points),
        exceeded=exceeded,
    )


class OptimalService:
    """
    Optimal constructions, the analytic frontier and the numerical checks of
    the trade-off, for the routes and the CLI.
    """

    def optimal(self, obs: ObservablePair) -> OptimalReport:
        return optimal_report(obs)

    def optimal_povm(self, obs: ObservablePair) -> JointPovm:
        return optimal_povm(obs)

    def boundary(self, theta: float, x_a: float) -> BoundaryPoint:
        """
        The analytic frontier value of X_B at X_A = `x_a`.

        Raises:
            InvalidParameter: If `x_a` is outside [0, 1].
        """

        return boundary_point(theta, x_a)

    def tradeoff(self, pair: AccuracyPair) -> TradeoffReport:
        return tradeoff_report(pair)

    def sweep(
        self,
        obs: ObservablePair,
        rng_seed: int,
        grid_size: int | None = None,
        restarts: int | None = None,
        workers: int | None = None,
        keep_witnesses: bool = True,
    ) -> SweepReport:
        return region_sweep(
            obs,
            grid_size=grid_size,
            rng_seed=rng_seed,
            restarts=restarts,
            workers=workers,
            keep_witnesses=keep_witnesses,
        )

    def fuzz(self, cases: int, rng_seed: int) -> FuzzReport:
        return fuzz_tradeoff(cases, rng_seed)
