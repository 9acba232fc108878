"""Command-line entry point: one executable for every pipeline stage."""

from __future__ import annotations

import dataclasses
import json
import sys

import click

from . import pipeline
from .config import RunConfig
from .corpus import _read_lines, tokenize
from .errors import MorphAugError
from .metrics import corpus_bleu


def _load_config(config, seed, workers, strategy, mode, tiers, out) -> RunConfig:
    cfg = RunConfig.from_file(config) if config else RunConfig().with_env_overrides()
    overrides = {}
    if seed is not None:
        overrides["rng_seed"] = seed
    if workers is not None:
        overrides["workers"] = workers
    if strategy is not None:
        overrides["strategy"] = strategy
    if mode is not None:
        overrides["selection_mode"] = mode
    if tiers is not None:
        overrides["tier_sizes"] = tuple(int(t) for t in tiers.split(","))
    if out is not None:
        overrides["out_dir"] = out
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _common(fn):
    fn = click.option("--config", type=click.Path(exists=True), default=None,
                      help="Flat JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Global RNG seed.")(fn)
    fn = click.option("--workers", type=int, default=None, help="Worker count.")(fn)
    fn = click.option("--strategy", type=click.Choice(["informed", "naive"]),
                      default=None)(fn)
    fn = click.option("--mode", type=click.Choice(["filtered", "random"]),
                      default=None)(fn)
    fn = click.option("--tiers", type=str, default=None,
                      help="Comma-separated tier sizes.")(fn)
    fn = click.option("--out", type=str, default=None, help="Output directory.")(fn)
    return fn


def _run(stage, *args):
    try:
        return stage(*args)
    except MorphAugError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Synthetic parallel data toolkit: align, augment, filter, assemble."""


def _stage_command(name, stage, echo=lambda result: str(result)):
    @main.command(name=name)
    @_common
    def command(config, seed, workers, strategy, mode, tiers, out):
        cfg = _load_config(config, seed, workers, strategy, mode, tiers, out)
        result = _run(stage, cfg)
        click.echo(echo(result))

    return command


_stage_command("align", pipeline.run_align)
_stage_command("train-lm", pipeline.run_train_lm)
_stage_command("augment", pipeline.run_augment,
               echo=lambda paths: "\n".join(str(p) for p in paths))
_stage_command("filter", pipeline.run_filter,
               echo=lambda paths: "\n".join(str(p) for p in paths))
_stage_command("build", pipeline.run_build)
_stage_command("stats", pipeline.run_stats,
               echo=lambda reports: "\n".join(json.dumps(r) for r in reports))


@main.command()
@_common
def validate(config, seed, workers, strategy, mode, tiers, out):
    """Check the configuration and list every problem found."""
    cfg = _load_config(config, seed, workers, strategy, mode, tiers, out)
    errors = cfg.validate()
    if errors:
        for err in errors:
            click.echo(f"invalid: {err}", err=True)
        sys.exit(1)
    click.echo("ok")


@main.command()
@click.argument("hypothesis", type=click.Path(exists=True))
@click.argument("reference", type=click.Path(exists=True))
@click.option("--smooth", is_flag=True, default=False,
              help="Add-one smoothing on n>=2 precisions.")
def bleu(hypothesis, reference, smooth):
    """Corpus BLEU between two line-aligned tokenized files."""
    from pathlib import Path

    hyps = [[t.surface for t in tokenize(l)] for l in _read_lines(Path(hypothesis))]
    refs = [[t.surface for t in tokenize(l)] for l in _read_lines(Path(reference))]
    result = _run(corpus_bleu, hyps, refs, 4, smooth)
    click.echo(str(result))


if __name__ == "__main__":
    main()
