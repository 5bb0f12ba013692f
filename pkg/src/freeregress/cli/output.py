"""
Report output for the command-line front end.

JSON is the canonical encoding; CSV carries (x, density) tables; rich tables
are for people reading a terminal.
"""

import json
import logging
from fractions import Fraction
from typing import Any, Dict, Sequence

import click
import numpy as np
from rich.console import Console
from rich.table import Table

from .command import OutputFormat, RunConfig

logger = logging.getLogger(__name__)

CSV_HEADER = "x,density"


def _encode(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Cannot encode {type(value).__name__} as JSON")


def render_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, default=_encode)


def render_csv(xs: Sequence[float], ys: Sequence[float]) -> str:
    """x,density rows in increasing x, 12 significant digits after the point."""
    lines = [CSV_HEADER]
    lines.extend(f"{float(x):.12e},{float(y):.12e}" for x, y in zip(xs, ys))
    return "\n".join(lines) + "\n"


def build_table(data: Dict[str, Any]) -> Table:
    """
    A rich table for a report.

    Identity reports list one row per identity; Monte Carlo rows also show the
    estimate and its gate. Other payloads list their result entries.
    """
    table = Table(title=str(data.get("command", "")))
    identities = data.get("identities")
    if identities:
        table.add_column("Identity", style="cyan")
        monte_carlo = "estimate" in identities[0]
        if monte_carlo:
            table.add_column("Estimate", justify="right")
            table.add_column("Gate", justify="right")
        else:
            table.add_column("Max residual", justify="right")
        table.add_column("Pass")
        for entry in identities:
            status = "[green]yes[/green]" if entry["pass"] else "[red]no[/red]"
            if monte_carlo:
                table.add_row(entry["name"], f"{entry['estimate']:.3e}", f"{entry['gate']:.3e}", status)
            else:
                table.add_row(entry["name"], f"{entry['residual_max']:.3e}", status)
        return table

    if "x" in data and "density" in data:
        table.add_column("x", justify="right", style="cyan")
        table.add_column("density", justify="right", style="green")
        for x, y in zip(data["x"], data["density"]):
            table.add_row(f"{x:.6g}", f"{y:.6g}")
        return table

    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    for key, value in data.get("result", {}).items():
        table.add_row(str(key), _format_value(value))
    return table


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def write_report(run: RunConfig, data: Dict[str, Any]) -> None:
    """
    Encode a report in the run's format and send it to its destination.

    Args:
        run: The run, which names the format and the output path
        data: Report payload; density payloads carry "x" and "density" lists
    """
    if run.output_format == OutputFormat.TABLE:
        table = build_table(data)
        if run.output_path is None:
            Console().print(table)
        else:
            with open(run.output_path, "w", encoding="utf-8") as handle:
                Console(file=handle, width=120).print(table)
        return

    if run.output_format == OutputFormat.CSV:
        text = render_csv(data["x"], data["density"])
    else:
        text = render_json(data)

    if run.output_path is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        run.output_path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {run.output_format.value} report to {run.output_path}")
