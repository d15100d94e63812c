"""Headless driver: run teaching scripts, replay transcripts, serve HTTP."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import uvicorn

from .dialog import SessionConfig
from .errors import TaskTutorError
from .scripts import bundled_script, run_script
from .service import create_app
from .transcripts import read_transcript, transcript_text, verify_replay


@click.group()
def main() -> None:
    """Interactive task learning engine."""


@main.command()
@click.option("--script", "script_path", required=True, help="Script file, or bundled name like 'onion_soup'.")
@click.option("--backend", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
@click.option("--confirmations", type=click.Choice(["on", "off"]), default="on", show_default=True)
@click.option("--layout", "layout_path", default=None, help="Layout file (default: bundled kitchen).")
@click.option("--metrics-out", "metrics_out", default=None, help="Write the metrics summary JSON here.")
@click.option("--transcript-out", "transcript_out", default=None, help="Write the session transcript here.")
@click.option("--scold-budget", default=2, show_default=True)
@click.option("--cook-ticks", default=0, show_default=True)
def teach(
    script_path: str,
    backend: str,
    confirmations: str,
    layout_path: str | None,
    metrics_out: str | None,
    transcript_out: str | None,
    scold_budget: int,
    cook_ticks: int,
) -> None:
    """Drive a scripted teaching session against an in-process engine."""
    path = Path(script_path)
    if path.is_file():
        text = path.read_text()
    else:
        try:
            text = bundled_script(script_path)
        except FileNotFoundError:
            raise click.ClickException(f"script not found: {script_path}")
    config = SessionConfig(
        backend=backend,
        confirmations=confirmations == "on",
        layout_path=layout_path,
        scold_budget=scold_budget,
        cook_ticks=cook_ticks,
    )
    try:
        result = run_script(text, config)
    except TaskTutorError as exc:
        raise click.ClickException(str(exc))
    assert result.session is not None and result.header is not None
    if transcript_out:
        Path(transcript_out).write_text(
            transcript_text(result.header, result.records)
        )
    metrics = result.session.export_metrics()
    if metrics_out:
        Path(metrics_out).write_text(json.dumps(metrics, indent=2, sort_keys=True))
    for failure in result.failures:
        click.echo(
            f"FAIL line {failure['line']} [{failure['directive']}] "
            f"{failure['reason']} (event index {failure['event_index']})",
            err=True,
        )
    click.echo(json.dumps(metrics, indent=2, sort_keys=True))
    if not result.ok:
        sys.exit(1)


@main.command()
@click.option("--transcript", "transcript_path", required=True)
def replay(transcript_path: str) -> None:
    """Re-derive a transcript's events and verify they match the recording."""
    try:
        header, records = read_transcript(transcript_path)
        report = verify_replay(header, records)
    except TaskTutorError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if not report.equal:
        sys.exit(1)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--storage", "storage_dir", default=None, help="Transcript directory for persistence.")
@click.option("--ui", "ui_dir", default=None, help="Static directory to serve as the web UI.")
def serve(port: int, host: str, storage_dir: str | None, ui_dir: str | None) -> None:
    """Run the multi-session HTTP service."""
    app = create_app(storage_dir=storage_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
