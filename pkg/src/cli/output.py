"""
Rendering of command results.

Floats are written with `Config.FLOAT_DIGITS` significant digits and non-finite
floats as null, in both JSON and CSV.
"""

import csv
import io
import json
import math
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping

import typer
from pydantic import BaseModel

from src.config import Config
from src.errors import MalformedInput


def jsonable(value: Any) -> Any:
    """Plain Python data for a model, mapping or sequence."""

    if isinstance(value, BaseModel):
        return jsonable(value.model_dump())
    if isinstance(value, Mapping):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if hasattr(value, "item"):
        return value.item()

    return value


def format_float(value: float) -> str | None:
    if not math.isfinite(value):
        return None
    return format(value, f".{Config.FLOAT_DIGITS}g")


def _render(value: Any, indent: int, depth: int) -> str:
    pad = " " * (indent * (depth + 1))
    closing = " " * (indent * depth)

    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value) or "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(key)}: {_render(item, indent, depth + 1)}"
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + closing + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(item, (dict, list)) for item in value):
            return "[" + ", ".join(_render(item, indent, depth + 1) for item in value) + "]"
        items = [f"{pad}{_render(item, indent, depth + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + closing + "]"

    raise TypeError(f"cannot render {type(value).__name__}")


def render_json(payload: Any, indent: int = 2) -> str:
    return _render(jsonable(payload), indent, 0) + "\n"


def flatten(payload: Any, prefix: str = "") -> dict[str, Any]:
    """One CSV row for a nested report: keys joined with dots, lists by index."""

    data = jsonable(payload)
    row: dict[str, Any] = {}

    if isinstance(data, dict):
        for key, item in data.items():
            row.update(flatten(item, f"{prefix}{key}."))
    elif isinstance(data, list):
        for index, item in enumerate(data):
            row.update(flatten(item, f"{prefix}{index}."))
    else:
        row[prefix.rstrip(".")] = data

    return row


def _csv_cell(value: Any) -> Any:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_float(value) or ""
    if value is None:
        return ""
    return value


def render_csv(rows: Iterable[Mapping[str, Any]], columns: list[str] | None = None) -> str:
    rows = [jsonable(row) for row in rows]
    if columns is None:
        columns = list(rows[0]) if rows else []

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: _csv_cell(row.get(column)) for column in columns})

    return buffer.getvalue()


def write_text(text: str, out: Path | None) -> None:
    """Write to `out`, or to stdout when `out` is None."""

    if out is None:
        typer.echo(text, nl=False)
        return

    try:
        out.write_text(text)
    except OSError as exc:
        raise MalformedInput(f"cannot write {out}: {exc.strerror}") from exc


def read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc


@contextmanager
def csv_stream(
    path: Path | None, columns: list[str]
) -> Iterator[Callable[[Any], None] | None]:
    """
    Open `path` for CSV rows written one at a time, each flushed immediately.

    Yields a `write_row(row)` callable, or None when `path` is None.
    """

    if path is None:
        yield None
        return

    try:
        handle = path.open("w", newline="")
    except OSError as exc:
        raise MalformedInput(f"cannot write {path}: {exc.strerror}") from exc

    with handle:
        writer = csv.DictWriter(
            handle, fieldnames=columns, extrasaction="ignore", lineterminator="\n"
        )
        writer.writeheader()
        handle.flush()

        def write_row(row: Any) -> None:
            data = jsonable(row)
            writer.writerow({column: _csv_cell(data.get(column)) for column in columns})
            handle.flush()

        yield write_row
