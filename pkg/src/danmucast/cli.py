"""Command-line entry point.

One command drives the staged pipeline; ``--stage`` selects which part to
run (default ``all``). Exit codes: 0 success, 1 validation error,
2 provider failure. Errors go to standard error as a structured one-line
report.
"""

from __future__ import annotations

import json
import logging
import sys

import click

from .errors import DanmucastError, ProviderFailure
from .pipeline import (
    PipelineConfig,
    run_all,
    run_curate,
    run_plan,
    run_render,
    run_segment,
)

STAGES = {
    "segment": run_segment,
    "curate": run_curate,
    "plan": run_plan,
    "render": run_render,
    "all": run_all,
}

EXIT_VALIDATION = 1
EXIT_PROVIDER = 2


def _fail(code: int, kind: str, message: str) -> "click.exceptions.Exit":
    report = json.dumps({"error": kind, "message": message})
    click.echo(report, err=True)
    return click.exceptions.Exit(code)


@click.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Pipeline configuration JSON file.")
@click.option("--stage", type=click.Choice(sorted(STAGES)), default="all",
              show_default=True, help="Pipeline stage to run.")
@click.option("--seed", type=int, default=None, help="Override the RNG seed.")
@click.option("--providers", "provider_mode",
              type=click.Choice(["offline", "remote"]), default=None,
              help="Override the provider mode.")
@click.option("--remote-url", default=None, help="Remote provider base URL.")
@click.option("--out", "out_dir", default=None,
              type=click.Path(file_okay=False), help="Override output directory.")
@click.option("--cache", "cache_dir", default=None,
              type=click.Path(file_okay=False),
              help="Override provider cache directory.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(config_path, stage, seed, provider_mode, remote_url, out_dir,
         cache_dir, verbose):
    """Compile a video's comments into an audio-discussion timeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = PipelineConfig.from_file(
            config_path, seed=seed, provider_mode=provider_mode,
            remote_url=remote_url, out_dir=out_dir, cache_dir=cache_dir,
        )
        result = STAGES[stage](config)
    except ProviderFailure as exc:
        raise _fail(EXIT_PROVIDER, "provider_failure", str(exc))
    except (DanmucastError, OSError, ValueError, TypeError,
            json.JSONDecodeError) as exc:
        raise _fail(EXIT_VALIDATION, type(exc).__name__, str(exc))
    click.echo(f"stage '{stage}' complete: {result}")


if __name__ == "__main__":
    main()
