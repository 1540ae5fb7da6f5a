"""Command-line shell: serve, reason, generate, dataset stats, experiment."""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import codegen, dataset as ds, experiment, gateway as gw, reasoning
from .catalog import spec_to_json
from .config import ServiceConfig, load_config
from .dataset import parse_aspect
from .experiment import ComparisonPair, SelectionRecord, parse_condition


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


def _load_dataset(path: str | None) -> ds.PreferenceDataset:
    if path:
        return ds.load_file(path)
    return ds.bundled_dataset("full")


def _resolve_gateway(config_path, mock_script) -> gw.Gateway:
    if mock_script:
        return gw.Gateway(provider=gw.MockProvider(gw.load_mock_script(mock_script)))
    if config_path:
        config = load_config(config_path)
        return gw.gateway_from_config(config.gateway)
    raise click.ClickException(
        "no model provider: pass --offline, --mock-script, or --config with a [gateway] section"
    )


def _context(task: str, aspects: str) -> reasoning.UserContext:
    names = [name.strip() for name in aspects.split(",") if name.strip()]
    if not names:
        raise click.ClickException("at least one aspect is required")
    try:
        parsed = tuple(parse_aspect(name) for name in names)
    except ds.UnknownAspect as exc:
        raise click.ClickException(str(exc))
    return reasoning.UserContext(task_description=task, aspects=parsed)


@click.group()
def main():
    """Preference-guided UI control reasoning and generation."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path) if config_path else ServiceConfig()
    if host:
        config.host = host
    if port:
        config.port = port
    uvicorn.run(create_app(config), host=config.host, port=config.port)


@main.command()
@click.option("--task", required=True, help="Natural-language task description.")
@click.option("--aspects", required=True, help="Comma-separated preference aspects.")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
@click.option("--runs", type=int, default=10, show_default=True)
@click.option("--offline", is_flag=True, help="Use the deterministic dataset-only path.")
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def reason(task, aspects, dataset_path, runs, offline, mock_script, config_path):
    """Reason preference-aligned controls; prints recommendation JSON."""
    ctx = _context(task, aspects)
    dataset = _load_dataset(dataset_path)
    if offline:
        try:
            recommendation = reasoning.fallback_recommendation(ctx, dataset)
        except reasoning.NoRelevantTask as exc:
            raise click.ClickException(str(exc))
    else:
        gateway = _resolve_gateway(config_path, mock_script)
        try:
            recommendation = reasoning.reason_ensemble(ctx, dataset, None, gateway, runs)
        except (reasoning.EnsembleFailed, gw.GatewayError) as exc:
            raise click.ClickException(str(exc))
    _echo_json(recommendation.to_json())


@main.command()
@click.option("--task", required=True)
@click.option("--aspects", required=True)
@click.option("--emit", type=click.Choice(["spec", "code"]), default="spec", show_default=True)
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
@click.option("--runs", type=int, default=10, show_default=True)
@click.option("--offline", is_flag=True)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def generate(task, aspects, emit, dataset_path, runs, offline, mock_script, config_path):
    """Generate a UI for the task: abstract specs or model-written code."""
    ctx = _context(task, aspects)
    dataset = _load_dataset(dataset_path)
    if offline:
        if emit == "code":
            raise click.ClickException("--emit code needs a model provider, not --offline")
        gateway = None
        try:
            recommendation = reasoning.fallback_recommendation(ctx, dataset)
        except reasoning.NoRelevantTask as exc:
            raise click.ClickException(str(exc))
    else:
        gateway = _resolve_gateway(config_path, mock_script)
        try:
            recommendation = reasoning.reason_ensemble(ctx, dataset, None, gateway, runs)
        except (reasoning.EnsembleFailed, gw.GatewayError) as exc:
            raise click.ClickException(str(exc))

    if emit == "spec":
        try:
            entry = dataset.task(task).entry
        except ds.NotFound:
            entry = None
        specs = codegen.emit_abstract_spec(recommendation, entry)
        _echo_json([spec_to_json(spec) for spec in specs])
        return

    try:
        generated = codegen.generate_code(
            recommendation, codegen.default_guidance(), gateway, task
        )
    except (codegen.SchemaError, codegen.LintError, gw.GatewayError) as exc:
        raise click.ClickException(str(exc))
    _echo_json(
        {
            "task": generated.task,
            "control_type": ", ".join(kind.value for kind in generated.kinds),
            "control_code": generated.code_text,
        }
    )


@main.group()
def dataset():
    """Dataset inspection commands."""


@dataset.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
def stats(dataset_path):
    """Print totals per task and aspect."""
    snapshot = _load_dataset(dataset_path)
    cells = [
        {
            "task": task.entry.name,
            "aspect": record.aspect.value,
            "total": record.total(),
        }
        for task in snapshot.tasks
        for record in task.records
    ]
    _echo_json(
        {
            "provenance": snapshot.provenance,
            "respondents_per_cell": snapshot.respondents_per_cell,
            "tasks": len(snapshot.tasks),
            "cells": len(cells),
            "total_pieces": ds.total_pieces(snapshot),
            "per_cell": cells,
        }
    )


@main.group()
def experiment_group():
    """Study planning and analysis."""


# expose as `alignui experiment ...`
main.add_command(experiment_group, name="experiment")


@experiment_group.command()
@click.option("--participants", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write JSON here instead of stdout.")
def plan(participants, seed, out):
    """Counterbalanced assignments for N participants."""
    if participants < 1:
        raise click.ClickException("--participants must be >= 1")
    assignments = []
    for i in range(participants):
        assignments.append(
            experiment.build_assignment(
                participant=f"p{i + 1:03d}",
                task_set=1 + (i % 2),
                permutation_index=(i // 2) % 6,
                latin_row=(i // 12) % 3,
                seed=seed,
            ).to_json()
        )
    payload = {
        "seed": seed,
        "design_size": experiment.design_size(),
        "assignments": assignments,
    }
    if out:
        Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        _echo_json(payload)


@experiment_group.command()
@click.option("--selections", "selections_path", type=click.Path(exists=True), required=True)
@click.option(
    "--group-by",
    type=click.Choice(["aspect", "task", "overall"]),
    default="overall",
    show_default=True,
)
@click.option("--svg", "svg_path", type=click.Path(), default=None)
def analyze(selections_path, group_by, svg_path):
    """Summarize pairwise selections with chi-squared significance."""
    records = []
    with open(selections_path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if "chosen" not in doc:
                continue  # preference-vote lines share the log
            try:
                records.append(
                    SelectionRecord(
                        participant=doc["participant"],
                        task=doc["task"],
                        aspect=parse_aspect(doc["aspect"]),
                        pair=ComparisonPair(
                            parse_condition(doc["left"]), parse_condition(doc["right"])
                        ),
                        chosen=parse_condition(doc["chosen"]),
                        timestamp=doc.get("timestamp", ""),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise click.ClickException(f"line {lineno}: {exc}")
    summary = experiment.summarize(records, group_by)
    if svg_path:
        experiment.render_summary_svg(summary, svg_path)
        summary["svg"] = str(svg_path)
    _echo_json(summary)


if __name__ == "__main__":
    main()
