"""
Command line surface: `python -m malea <command>`.

Exit codes: 0 success, 1 lint violations with --strict (or replay mismatch),
2 config error, 3 success with a review ended by the cycle limit,
4 provider failure, 5 parse failure, 6 mapping validation failure,
7 output exists and --force not given.
"""
import json
import logging
from pathlib import Path

import click
from dotenv import load_dotenv

from malea.artifacts import prepare_output_dir, read_transcript, write_partial_transcript, write_session
from malea.config import load_config
from malea.detectors.run_all import lint_report, load_lexicon
from malea.errors import ConfigError, FormatError, MaleaError, ProviderError, SessionAborted, ValidationFailed
from malea.evaluation import (
    MetricsRow, aggregate, compute_metrics, read_gold, read_mapping, render_aggregate, render_table,
    report_records, suggest_mapping, theme_coverage, validate_mapping, write_mapping,
)
from malea.evaluation.cases import case_files
from malea.logging_setup import configure_logging
from malea.models import SystemDescription
from malea.orchestrator import SessionStatus, run_baseline, run_session
from malea.providers import RecordingProvider, ReplayProvider, build_provider
from malea.stories import decompose_all, export_requirements, load_requirements, parse_document
from malea.taxonomy import default_taxonomy, load_taxonomy

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_LINT = 1
EXIT_CONFIG = 2
EXIT_CYCLE_LIMIT = 3
EXIT_PROVIDER = 4
EXIT_PARSE = 5
EXIT_VALIDATION = 6
EXIT_EXISTS = 7

STATUS_EXIT = {
    SessionStatus.APPROVED: EXIT_OK,
    SessionStatus.COMPLETED: EXIT_OK,
    SessionStatus.CYCLE_LIMIT: EXIT_CYCLE_LIMIT,
    SessionStatus.PARSE_FAILURE: EXIT_PARSE,
}

FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


def _fail(ctx, message, code):
    click.echo(f"Error: {message}", err=True)
    ctx.exit(code)


@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default: $MALEA_LOG_LEVEL or INFO).")
def cli(log_level):
    """Multi-agent elicitation of ethics requirements."""
    load_dotenv()
    configure_logging(log_level)


def _load_run_config(ctx, config_path, seed=None, max_cycles=None):
    try:
        return load_config(config_path).with_overrides(seed=seed, max_critique_cycles=max_cycles)
    except ConfigError as e:
        _fail(ctx, e, EXIT_CONFIG)


def _execute(config, description, provider, baseline, record=None):
    try:
        if baseline:
            return run_baseline(config, description, provider)
        return run_session(config, description, provider)
    finally:
        if record is not None and isinstance(provider, RecordingProvider):
            provider.save(record)


@cli.command()
@click.argument("description_file", type=FILE)
@click.option("--config", "config_path", required=True, type=FILE)
@click.option("--output", "output", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--baseline", is_flag=True, help="Single call with the initiator prompt, no critique loops.")
@click.option("--replay", type=FILE, help="Serve provider calls from a cassette.")
@click.option("--record", type=click.Path(dir_okay=False, path_type=Path), help="Write a cassette of this run.")
@click.option("--script", type=FILE, help="Serve provider calls from a scripted-responses YAML file.")
@click.option("--seed", type=int)
@click.option("--max-cycles", type=int)
@click.option("--force", is_flag=True, help="Overwrite a non-empty output directory.")
@click.pass_context
def run(ctx, description_file, config_path, output, baseline, replay, record, script, seed, max_cycles, force):
    """Run a session (or the single-call baseline) and write its artifacts."""
    config = _load_run_config(ctx, config_path, seed, max_cycles)
    if output.exists() and any(output.iterdir()) and not force:
        _fail(ctx, f"{output} is not empty; pass --force to overwrite", EXIT_EXISTS)
    try:
        description = SystemDescription.from_file(description_file)
        provider = build_provider(config, replay=replay, record=record, script=script)
    except ConfigError as e:
        _fail(ctx, e, EXIT_CONFIG)
    except (FormatError, ValueError) as e:
        _fail(ctx, e, EXIT_PARSE)

    try:
        result = _execute(config, description, provider, baseline, record)
    except SessionAborted as e:
        write_partial_transcript(e.transcript, output, force=True)
        _fail(ctx, f"provider failure ({e.cause.kind.value}): {e.cause.detail}", EXIT_PROVIDER)

    write_session(result, output, force=True)
    click.echo(f"Session {result.transcript.session_id}: {result.status.value}")
    for phase, outcome in result.termination_summary().items():
        click.echo(f"  {phase}: {outcome}")
    click.echo(f"  provider calls: {result.provider_calls}")
    click.echo(f"  stories: {len(result.stories)}, placeholders: {result.placeholder_count}")
    if result.residue:
        click.echo(f"  residue lines: {len(result.residue)} (see manifest.json)")
    click.echo(f"Artifacts written to {output}")
    ctx.exit(STATUS_EXIT[result.status])


def _eval_inputs(ctx, cases, gold, mapping, requirements):
    triples = []
    for case_ref in cases:
        try:
            files = case_files(case_ref)
        except ConfigError as e:
            _fail(ctx, e, EXIT_CONFIG)
        triples.append((files.system_label, files.set_label, files.gold, files.mapping, files.requirements))
    if gold or mapping or requirements:
        if not (len(gold) == len(mapping) == len(requirements)):
            _fail(ctx, "--gold, --mapping and --requirements must be given the same number of times", EXIT_CONFIG)
        for g, m, r in zip(gold, mapping, requirements):
            triples.append((g.parent.name, m.parent.name, g, m, r))
    if not triples:
        _fail(ctx, "nothing to evaluate; give --case or --gold/--mapping/--requirements", EXIT_CONFIG)
    return triples


@cli.command(name="eval")
@click.option("--case", "cases", multiple=True, help="Bundled case study, e.g. ssl/malea.")
@click.option("--gold", multiple=True, type=FILE)
@click.option("--mapping", multiple=True, type=FILE)
@click.option("--requirements", multiple=True, type=FILE)
@click.option("--aggregate", "pooled", is_flag=True, help="Also print pooled figures over all inputs.")
@click.option("--force", is_flag=True, help="Report even when the mapping has validation findings.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def eval_command(ctx, cases, gold, mapping, requirements, pooled, force, as_json):
    """Compute precision/recall rows from gold sets and mapping records."""
    rows = []
    try:
        for system, set_name, gold_path, mapping_path, req_path in _eval_inputs(ctx, cases, gold, mapping, requirements):
            gold_set = read_gold(gold_path)
            records = read_mapping(mapping_path)
            findings = validate_mapping(records, gold_set, load_requirements(req_path))
            if findings and not force:
                for finding in findings:
                    click.echo(f"{mapping_path}: {finding}", err=True)
                ctx.exit(EXIT_VALIDATION)
            rows.append(MetricsRow(system, set_name, compute_metrics(records, gold_set)))
    except FormatError as e:
        _fail(ctx, e, EXIT_PARSE)

    if as_json:
        payload = {"rows": report_records(rows)}
        if pooled:
            payload["aggregate"] = aggregate([r.report for r in rows]).to_dict()
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(render_table(rows))
    if pooled:
        click.echo("")
        click.echo(render_aggregate(aggregate([r.report for r in rows]), "Pooled"))


@cli.command()
@click.argument("files", nargs=-1, required=True, type=FILE)
@click.option("--lexicon", type=FILE, help="Vague-term list (default: the shipped lexicon).")
@click.option("--strict", is_flag=True, help="Exit 1 when any violation is found.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def lint(ctx, files, lexicon, strict, as_json):
    """Check stories against the atomic, minimal, unambiguous and estimable criteria."""
    try:
        terms = load_lexicon(lexicon)
    except FormatError as e:
        _fail(ctx, e, EXIT_CONFIG)
    total = 0
    reports = {}
    for path in files:
        report = lint_report(parse_document(path.read_text(encoding="utf-8")).stories, terms)
        reports[str(path)] = report
        total += report.total
    if as_json:
        click.echo(json.dumps({name: r.to_dict() for name, r in reports.items()}, indent=2))
    else:
        for name, report in reports.items():
            click.echo(f"== {name}")
            click.echo(report.render())
    if strict and total:
        ctx.exit(EXIT_LINT)


@cli.command()
@click.argument("document", type=FILE)
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--mode", type=click.Choice(["rule", "llm"]), default="rule", show_default=True)
@click.option("--config", "config_path", type=FILE, help="Required for --mode llm.")
@click.option("--replay", type=FILE)
@click.option("--force", is_flag=True)
@click.pass_context
def decompose(ctx, document, output, mode, config_path, replay, force):
    """Split the acceptance criteria of a story document into discrete requirements."""
    if output.exists() and not force:
        _fail(ctx, f"{output} exists; pass --force to overwrite", EXIT_EXISTS)
    stories = parse_document(document.read_text(encoding="utf-8")).stories
    provider = config = None
    if mode == "llm":
        if config_path is None:
            _fail(ctx, "--mode llm needs --config", EXIT_CONFIG)
        config = _load_run_config(ctx, config_path)
        try:
            provider = build_provider(config, replay=replay)
        except ConfigError as e:
            _fail(ctx, e, EXIT_CONFIG)
    warnings = []
    requirements = decompose_all(stories, mode, provider, config, warnings)
    export_requirements(requirements, output)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"{len(requirements)} requirement(s) from {len(stories)} stories written to {output}")


@cli.command()
@click.argument("cassette", type=FILE)
@click.option("--description", "description_file", required=True, type=FILE)
@click.option("--config", "config_path", required=True, type=FILE)
@click.option("--golden", type=FILE, help="Transcript to compare against.")
@click.option("--baseline", is_flag=True)
@click.option("--output", type=click.Path(file_okay=False, path_type=Path))
@click.option("--force", is_flag=True)
@click.pass_context
def replay(ctx, cassette, description_file, config_path, golden, baseline, output, force):
    """Re-run a session from a cassette without network access."""
    config = _load_run_config(ctx, config_path)
    try:
        provider = ReplayProvider.from_file(cassette)
        description = SystemDescription.from_file(description_file)
        expected = [(m.role.value, m.phase.value, m.content) for m in read_transcript(golden)] if golden else None
    except (FormatError, ValueError) as e:
        _fail(ctx, e, EXIT_PARSE)
    try:
        result = run_baseline(config, description, provider) if baseline else run_session(config, description, provider)
    except SessionAborted as e:
        _fail(ctx, f"replay failed ({e.cause.kind.value}): {e.cause.detail}", EXIT_PROVIDER)
    if output is not None:
        try:
            prepare_output_dir(output, force)
        except FileExistsError as e:
            _fail(ctx, e, EXIT_EXISTS)
        write_session(result, output, force=True)

    click.echo(f"Replayed {result.provider_calls} call(s): {result.status.value}")
    if expected is not None:
        if list(result.transcript.contents()) != expected:
            click.echo("Transcript differs from the golden transcript", err=True)
            ctx.exit(EXIT_LINT)
        click.echo("Transcript identical to the golden transcript")


@cli.command()
@click.argument("requirements_file", type=FILE)
@click.option("--taxonomy", type=FILE, help="Taxonomy YAML with per-topic keywords.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def coverage(ctx, requirements_file, taxonomy, as_json):
    """Count requirements per ethics topic."""
    try:
        themes = load_taxonomy(taxonomy) if taxonomy else default_taxonomy()
        requirements = load_requirements(requirements_file)
    except ConfigError as e:
        _fail(ctx, e, EXIT_CONFIG)
    except FormatError as e:
        _fail(ctx, e, EXIT_PARSE)
    report = theme_coverage(requirements, themes)
    click.echo(json.dumps(report.to_dict(), indent=2) if as_json else report.render())


@cli.command(name="suggest-mapping")
@click.option("--requirements", "requirements_file", required=True, type=FILE)
@click.option("--gold", "gold_file", required=True, type=FILE)
@click.option("--config", "config_path", required=True, type=FILE)
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--replay", type=FILE)
@click.option("--force", is_flag=True)
@click.pass_context
def suggest_mapping_command(ctx, requirements_file, gold_file, config_path, output, replay, force):
    """Draft a mapping with the LLM; every record is marked unreviewed."""
    if output.exists() and not force:
        _fail(ctx, f"{output} exists; pass --force to overwrite", EXIT_EXISTS)
    config = _load_run_config(ctx, config_path)
    try:
        provider = build_provider(config, replay=replay)
        records = suggest_mapping(load_requirements(requirements_file), read_gold(gold_file), provider, config)
    except ConfigError as e:
        _fail(ctx, e, EXIT_CONFIG)
    except FormatError as e:
        _fail(ctx, e, EXIT_PARSE)
    except ProviderError as e:
        _fail(ctx, e, EXIT_PROVIDER)
    write_mapping(records, output)
    click.echo(f"{sum(r.mapped for r in records)} of {len(records)} requirement(s) mapped; review {output} "
               f"and set reviewed=true before evaluating")


def main():
    try:
        cli(standalone_mode=True)
    except FormatError as e:
        logger.error("%s", e)
        raise SystemExit(EXIT_PARSE)
    except ValidationFailed as e:
        logger.error("%s", e)
        raise SystemExit(EXIT_VALIDATION)
    except MaleaError as e:
        logger.error("%s", e)
        raise SystemExit(EXIT_CONFIG)
