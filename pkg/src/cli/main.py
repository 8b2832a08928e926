"""
Command-line interface of the QTradeoff toolkit.

Every command reads JSON documents, delegates to one service operation and
writes the result as JSON (default) or CSV. Stochastic commands require
`--seed`; the same arguments always produce byte-identical output.

Exit codes: 0 ok, 1 domain or constraint violation, 2 I/O or parse error.
"""

import functools
import json
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Callable, Optional

import typer
from rich.console import Console

from src.errors import NonidealConditionViolated, QTradeoffException
from src.logger import configure_logging
from src.bloch.schemas import JointPovm, Observable, ObservablePair, constraint_guard
from src.bloch.service import PovmService
from src.channel.schemas import AccuracyPair
from src.channel.service import ChannelService
from src.optimal.service import OptimalService
from src.simulation.service import SimulationService
from src.sequential.service import SequentialService
from src.cli.output import (
    csv_stream,
    flatten,
    read_text,
    render_csv,
    render_json,
    write_text,
)

app = typer.Typer(
    name="qtradeoff",
    help="Accuracy trade-off of simultaneous qubit measurements.",
    add_completion=False,
    no_args_is_help=True,
)

error_console = Console(stderr=True)

povm_service = PovmService()
channel_service = ChannelService()
optimal_service = OptimalService()
simulation_service = SimulationService()
sequential_service = SequentialService()

SWEEP_COLUMNS = ["index", "theta", "x_a_target", "x_a", "x_b_achieved", "x_b_boundary", "gap"]
TRIAL_COLUMNS = ["trial", "p_star_a", "p_star_b"]


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


ObservablesOption = Annotated[
    Optional[Path],
    typer.Option("--observables", help="JSON file {\"n_a\": [...], \"n_b\": [...]}."),
]
ThetaOption = Annotated[
    Optional[float],
    typer.Option("--theta", help="Angle between canonical observables (radians)."),
]
DegreesOption = Annotated[
    bool, typer.Option("--degrees", help="Read --theta in degrees.")
]
OutOption = Annotated[
    Optional[Path], typer.Option("--out", help="Write the result here instead of stdout.")
]
FormatOption = Annotated[
    OutputFormat, typer.Option("--format", help="Output format.")
]
VerboseOption = Annotated[
    bool, typer.Option("--verbose", "-v", help="Log debug messages to stderr.")
]
SeedOption = Annotated[
    int, typer.Option("--seed", min=0, help="Master seed (unsigned).")
]
WorkersOption = Annotated[
    Optional[int], typer.Option("--workers", min=1, help="Process-pool width.")
]


def handle_errors(command: Callable[..., None]) -> Callable[..., None]:
    """Report toolkit exceptions on stderr and exit with their exit code."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        configure_logging("DEBUG" if kwargs.get("verbose") else None)
        try:
            command(*args, **kwargs)
        except QTradeoffException as exc:
            error_console.print(f"[bold red]error:[/] {exc.detail}")
            error_console.print_json(json.dumps(exc.to_dict(), default=str))
            raise typer.Exit(code=exc.exit_code) from exc

    return wrapper


def resolve_observables(
    observables: Path | None, theta: float | None, degrees: bool
) -> ObservablePair:
    """Observables from a file, or the canonical pair at angle `theta`."""

    if (observables is None) == (theta is None):
        raise typer.BadParameter("give exactly one of --observables and --theta")
    if observables is not None:
        return povm_service.read_observables(read_text(observables))

    return povm_service.observables_at(theta, degrees=degrees)


def load_povm(path: Path | None, obs: ObservablePair) -> JointPovm:
    """The POVM in `path`, or the optimal POVM for `obs` when no file is given."""

    if path is None:
        return optimal_service.optimal_povm(obs)

    return povm_service.read_povm(read_text(path))


def emit(
    payload: Any,
    fmt: OutputFormat,
    out: Path | None,
    rows: list[Any] | None = None,
    columns: list[str] | None = None,
) -> None:
    if fmt is OutputFormat.csv:
        text = render_csv(rows if rows is not None else [flatten(payload)], columns)
    else:
        text = render_json(payload)

    write_text(text, out)


@app.command()
@handle_errors
def validate(
    povm_file: Annotated[Path, typer.Argument(help="Joint POVM JSON file.")],
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Check every joint-POVM invariant and the nonideal condition of both marginals."""

    povm = povm_service.read_povm(read_text(povm_file))
    obs = resolve_observables(observables, theta, degrees)
    report = channel_service.validate(povm, obs)

    emit(report, fmt, out)

    if not report.conforming:
        failing = report.nonideal.a if not report.nonideal.a.conforming else report.nonideal.b
        raise NonidealConditionViolated(failing.observable, failing.deviation)


@app.command()
@handle_errors
def accuracy(
    povm_file: Annotated[Path, typer.Argument(help="Joint POVM JSON file.")],
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Channels F_A, F_B with their accuracies, errors and trade-off verdicts."""

    povm = povm_service.read_povm(read_text(povm_file))
    obs = resolve_observables(observables, theta, degrees)

    emit(channel_service.accuracy(povm, obs), fmt, out)


@app.command()
@handle_errors
def tradeoff(
    theta: Annotated[float, typer.Option("--theta", help="Angle between the observables.")],
    x_a: Annotated[Optional[float], typer.Option("--x-a", help="Accuracy of A.")] = None,
    x_b: Annotated[Optional[float], typer.Option("--x-b", help="Accuracy of B.")] = None,
    e_a: Annotated[Optional[float], typer.Option("--e-a", help="Error of A (inf allowed).")] = None,
    e_b: Annotated[Optional[float], typer.Option("--e-b", help="Error of B (inf allowed).")] = None,
    degrees: DegreesOption = False,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Check an accuracy (or error) pair against both trade-off relations."""

    angle = povm_service.observables_at(theta, degrees=degrees).theta

    with constraint_guard():
        if x_a is not None and x_b is not None and e_a is None and e_b is None:
            pair = AccuracyPair(x_a=x_a, x_b=x_b, theta=angle)
        elif e_a is not None and e_b is not None and x_a is None and x_b is None:
            if e_a < 0 or e_b < 0:
                raise typer.BadParameter("errors must be nonnegative")
            pair = AccuracyPair.from_errors(e_a, e_b, angle)
        else:
            raise typer.BadParameter("give either --x-a and --x-b, or --e-a and --e-b")

    emit(optimal_service.tradeoff(pair), fmt, out)


@app.command()
@handle_errors
def optimal(
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    povm_out: Annotated[
        Optional[Path], typer.Option("--povm-out", help="Also write the POVM document here.")
    ] = None,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """The joint POVM reaching equality in the accuracy trade-off."""

    obs = resolve_observables(observables, theta, degrees)
    report = optimal_service.optimal(obs)

    if povm_out is not None:
        write_text(render_json(report.povm), povm_out)

    emit(report, fmt, out)


@app.command()
@handle_errors
def sweep(
    seed: SeedOption,
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    grid: Annotated[Optional[int], typer.Option("--grid", help="Grid points on X_A in [0, 1].")] = None,
    restarts: Annotated[Optional[int], typer.Option("--restarts", help="Nelder-Mead starts per point.")] = None,
    workers: WorkersOption = None,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.csv,
    verbose: VerboseOption = False,
):
    """
    Map the frontier of the accessible accuracy region.

    CSV columns: index, theta, x_a_target, x_a, x_b_achieved, x_b_boundary, gap.
    """

    obs = resolve_observables(observables, theta, degrees)
    report = optimal_service.sweep(
        obs,
        rng_seed=seed,
        grid_size=grid,
        restarts=restarts,
        workers=workers,
        keep_witnesses=fmt is OutputFormat.json,
    )

    rows = [
        {**point.model_dump(exclude={"achieved_by", "x_b"}), "x_b_achieved": point.x_b}
        for point in report.points
    ]

    emit(report, fmt, out, rows=rows, columns=SWEEP_COLUMNS)


@app.command("simulate")
@handle_errors
def simulate_command(
    state_file: Annotated[Path, typer.Option("--state", help="State JSON file {\"r\": [...]}.")],
    n: Annotated[int, typer.Option("--n", help="Number of samples.")],
    seed: SeedOption,
    povm_file: Annotated[
        Optional[Path], typer.Argument(help="Joint POVM JSON file (default: optimal POVM).")
    ] = None,
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """
    Sample outcome counts of a joint POVM.

    CSV columns: outcome, count.
    """

    povm = _povm_for(povm_file, observables, theta, degrees)
    counts = simulation_service.simulate(povm, povm_service.read_state(read_text(state_file)), n, seed)
    rows = [{"outcome": key, "count": value} for key, value in counts.counts.items()]

    emit(counts, fmt, out, rows=rows, columns=["outcome", "count"])


@app.command("estimate")
@handle_errors
def estimate_command(
    povm_file: Annotated[
        Optional[Path], typer.Argument(help="Joint POVM JSON file (default: optimal POVM).")
    ] = None,
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    counts_file: Annotated[
        Optional[Path], typer.Option("--counts", help="Counts JSON file.")
    ] = None,
    state_file: Annotated[
        Optional[Path], typer.Option("--state", help="Simulate counts on this state.")
    ] = None,
    n: Annotated[Optional[int], typer.Option("--n", help="Samples to simulate.")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", min=0, help="Seed for simulation.")] = None,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Maximum-likelihood estimates of p_A(+) and p_B(+) from counts or a fresh simulation."""

    obs = resolve_observables(observables, theta, degrees)
    povm = load_povm(povm_file, obs)

    if counts_file is not None:
        counts = simulation_service.read_counts(read_text(counts_file))
    elif state_file is not None and n is not None and seed is not None:
        counts = simulation_service.simulate(povm, povm_service.read_state(read_text(state_file)), n, seed)
    else:
        raise typer.BadParameter("give --counts, or --state with --n and --seed")

    emit(simulation_service.estimate(povm, obs, counts), fmt, out)


@app.command()
@handle_errors
def experiment(
    state_file: Annotated[Path, typer.Option("--state", help="State JSON file.")],
    n: Annotated[int, typer.Option("--n", help="Samples per trial.")],
    trials: Annotated[int, typer.Option("--trials", help="Independent trials.")],
    seed: SeedOption,
    povm_file: Annotated[
        Optional[Path], typer.Argument(help="Joint POVM JSON file (default: optimal POVM).")
    ] = None,
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    observable: Annotated[
        Optional[list[str]], typer.Option("--observable", help="A and/or B (default both).")
    ] = None,
    trials_out: Annotated[
        Optional[Path], typer.Option("--trials-out", help="Per-trial CSV (trial, p_star_a, p_star_b).")
    ] = None,
    workers: WorkersOption = None,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """
    Compare the estimator's variance with 1 / (N I) over many trials.

    CSV columns: one row per observable with the variance ratio. With
    `--trials-out`, per-trial rows are written as each trial finishes.
    """

    obs = resolve_observables(observables, theta, degrees)
    povm = load_povm(povm_file, obs)
    selected = _observable_names(observable)

    state = povm_service.read_state(read_text(state_file))

    with csv_stream(trials_out, TRIAL_COLUMNS) as write_row:
        report = simulation_service.experiment(
            povm,
            obs,
            state,
            n_per_trial=n,
            trials=trials,
            rng_seed=seed,
            observables=selected,
            workers=workers,
            on_trial=write_row,
        )

    summary = report.model_copy(update={"rows": []})
    emit(summary, fmt, out, rows=report.observables)


@app.command()
@handle_errors
def sequential(
    eta: Annotated[float, typer.Option("--eta", help="Sharpness of the A measurement.")],
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Measure A with the square-root instrument, then B, and check E_A D_B >= sin^2(theta)."""

    obs = resolve_observables(observables, theta, degrees)

    emit(sequential_service.report(obs, eta), fmt, out)


@app.command()
@handle_errors
def split(
    xi: Annotated[float, typer.Option("--xi", help="Fraction of samples measured for A.")],
    observables: ObservablesOption = None,
    theta: ThetaOption = None,
    degrees: DegreesOption = False,
    sub_accuracy_a: Annotated[float, typer.Option("--sub-accuracy-a")] = 1.0,
    sub_accuracy_b: Annotated[float, typer.Option("--sub-accuracy-b")] = 1.0,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """Accuracies of measuring A and B on separate parts of the sample."""

    obs = resolve_observables(observables, theta, degrees)

    emit(simulation_service.split(obs, xi, sub_accuracy_a, sub_accuracy_b), fmt, out)


@app.command()
@handle_errors
def fuzz(
    seed: SeedOption,
    cases: Annotated[int, typer.Option("--cases", help="Random joint POVMs to check.")] = 1_000_000,
    out: OutOption = None,
    fmt: FormatOption = OutputFormat.json,
    verbose: VerboseOption = False,
):
    """
    Check the trade-off on random valid nonideal joint POVMs.

    Exits with 1 when any sample breaks a POVM constraint, the trade-off, or the
    agreement between the two trade-off verdicts.
    """

    report = optimal_service.fuzz(cases, seed)

    emit(report, fmt, out)

    failures = (
        report.invalid_povms
        + report.nonconforming
        + report.tradeoff_violations
        + report.triangle_violations
        + report.verdict_mismatches
    )
    if failures:
        error_console.print(f"[bold red]{failures} failing case(s)[/]")
        raise typer.Exit(code=1)


def _povm_for(
    povm_file: Path | None, observables: Path | None, theta: float | None, degrees: bool
) -> JointPovm:
    if povm_file is not None:
        return povm_service.read_povm(read_text(povm_file))

    return optimal_service.optimal_povm(resolve_observables(observables, theta, degrees))


def _observable_names(values: list[str] | None) -> tuple[Observable, ...]:
    if not values:
        return ("A", "B")
    names = tuple(value.upper() for value in values)
    if any(name not in ("A", "B") for name in names):
        raise typer.BadParameter("--observable takes A or B")

    return names  # type: ignore[return-value]
