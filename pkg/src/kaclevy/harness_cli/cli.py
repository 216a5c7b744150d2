"""Command line entry point: ``kaclevy <task> --config FILE [options]``.

Exit status: 0 on success or a passing verify suite, 1 when a verify check
fails, 2 on usage, configuration or model errors.
"""
from __future__ import annotations

import sys
from dataclasses import replace

import click

from ..errors import KacLevyError
from .config import FORMATS, TASKS, ConfigError, parse_config
from .output import emit_grid
from .tasks import run_task, with_overrides
from .verify import McReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("task", type=click.Choice(TASKS))
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
              help="JSON run configuration.")
@click.option("--out", default=None, help="Output path (stdout if omitted).")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None)
@click.option("--paths", type=click.IntRange(min=1), default=None, help="Monte-Carlo sample size.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
def main(task, config_path, out, seed, paths, fmt, workers):
    try:
        with open(config_path, encoding="utf-8") as fh:
            config = parse_config(fh.read())
    except OSError as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if config.task != task:
        config = replace(config, task=task)
        if config.model is None and task != "verify":
            click.echo(f"error: task {task!r} needs a model", err=True)
            sys.exit(EXIT_USAGE)
    config = with_overrides(config, seed=seed, paths=paths, fmt=fmt, workers=workers, out=out)

    try:
        result = run_task(config)
    except (KacLevyError, ValueError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)

    if isinstance(result, McReport):
        text = result.render()
        if config.output is None:
            sys.stdout.write(text)
        else:
            with open(config.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        s = result.summary()
        click.echo(f"{s['checks']} checks, {s['failed']} failed, {s['skipped']} skipped", err=True)
        sys.exit(EXIT_OK if result.passed else EXIT_FAIL)

    emit_grid(result, config.format, config.output)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
