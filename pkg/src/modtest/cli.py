"""Command-line entry point for the metamorphic moderation-testing pipeline."""

from __future__ import annotations

import json
import os
import sys

import click

from . import corpus as corpus_mod
from . import harness, lexicon, report as report_mod
from .errors import ModtestError
from .models import PerturbationSpec
from .modclient import (HttpClient, HttpTargetConfig, MockModerationServer,
                        ReferenceModerator, ReferenceModeratorConfig)
from .mrs.pipeline import ALL_MR_IDS, MR_REGISTRY, compose


def _load_corpus(path: str, fmt: str | None) -> corpus_mod.SeedCorpus:
    if fmt is None:
        ext = os.path.splitext(path)[1].lower().lstrip(".")
        fmt = {"csv": "csv", "tsv": "tsv"}.get(ext, "jsonl")
    return corpus_mod.load_seeds(path, format=fmt)


def _parse_mrs(mrs: str) -> list[str]:
    if mrs == "all":
        return list(ALL_MR_IDS)
    slugs = [s.strip() for s in mrs.split(",") if s.strip()]
    for slug in slugs:
        if slug not in MR_REGISTRY:
            raise click.UsageError(f"unknown MR name {slug!r}; choose from: "
                                   + ", ".join(ALL_MR_IDS))
    return slugs


def _parse_combo(combo: str) -> tuple[PerturbationSpec, ...]:
    slugs = [s.strip() for s in combo.split("+") if s.strip()]
    if not slugs:
        raise click.UsageError("empty --combo")
    for slug in slugs:
        if slug not in MR_REGISTRY:
            raise click.UsageError(f"unknown MR name {slug!r} in combo {combo!r}")
    try:
        return compose([PerturbationSpec(mr_id=s) for s in slugs])
    except ModtestError as exc:
        raise click.UsageError(str(exc))


@click.group()
def main():
    """Metamorphic testing toolkit for image-based content moderation."""


@main.group()
def seeds():
    """Seed corpus operations."""


@seeds.command("filter")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "tsv", "jsonl"]), default=None)
@click.option("--baseline-verdicts", required=True, type=click.Path(exists=True),
              help="JSON object mapping seed_id to toxic/non_toxic.")
@click.option("--out", required=True, type=click.Path())
def seeds_filter(corpus_path, fmt, baseline_verdicts, out):
    """Keep only seeds the target already flags as toxic at baseline."""
    corpus = _load_corpus(corpus_path, fmt)
    with open(baseline_verdicts, encoding="utf-8") as fh:
        verdicts = json.load(fh)
    filtered = corpus_mod.filter_baseline(corpus, verdicts)
    with open(out, "w", encoding="utf-8") as fh:
        for seed in filtered:
            fh.write(json.dumps({
                "seed_id": seed.seed_id, "text": seed.text,
                "language": seed.language, "category": seed.category,
                "source": seed.source}, ensure_ascii=False) + "\n")
    click.echo(f"kept {len(filtered)} of {len(corpus)} seeds -> {out}")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "tsv", "jsonl"]), default=None)
@click.option("--mrs", default="all", show_default=True,
              help='Comma-separated MR slugs, or "all".')
@click.option("--combo", multiple=True,
              help='MR chain like "font-color+mirror"; repeatable.')
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--rng-seed", default=0, show_default=True, type=int)
@click.option("--benign-lexicon", type=click.Path(exists=True), default=None,
              help="Replacement for the bundled benign word list.")
@click.option("--toxic-lexicon", type=click.Path(exists=True), default=None,
              help="Words the font-size MR shrinks.")
def generate(corpus_path, fmt, mrs, combo, out_dir, rng_seed, benign_lexicon,
             toxic_lexicon):
    """Render the test suite: one image per (seed, MR chain)."""
    corpus = _load_corpus(corpus_path, fmt)
    specs: list = [PerturbationSpec(mr_id=s) for s in _parse_mrs(mrs)] if mrs else []
    specs += [_parse_combo(c) for c in combo]
    benign = (lexicon.load_wordlist(benign_lexicon) if benign_lexicon
              else lexicon.bundled_benign_words())
    toxic = lexicon.load_wordlist(toxic_lexicon) if toxic_lexicon else None
    entries = harness.generate_suite(corpus, specs, out_dir, rng_seed=rng_seed,
                                     benign_words=benign, toxic_lexicon=toxic)
    skipped = sum(1 for e in entries if "skipped_reason" in e)
    click.echo(f"generated {len(entries) - skipped} cases "
               f"({skipped} skipped) -> {out_dir}/manifest.jsonl")


def _make_client(target: str, endpoint: str | None, banned_lexicon: str | None,
                 threshold: float):
    if target == "mock":
        cfg = HttpTargetConfig(
            endpoint=endpoint or "http://127.0.0.1:8080/moderate",
            image_field="image", label_path="label",
            label_map={"toxic": "toxic", "non_toxic": "non_toxic"},
            ground_truth_field="ground_truth", name="mock")
        return HttpClient(cfg)
    if target == "reference":
        if not banned_lexicon:
            raise click.UsageError("--target reference needs --banned-lexicon")
        words = lexicon.load_wordlist(banned_lexicon)
        return ReferenceModerator(ReferenceModeratorConfig(
            banned_words=words, match_threshold=threshold))
    if target.startswith("http:"):
        return HttpClient(HttpTargetConfig.from_file(target[len("http:"):]))
    raise click.UsageError(f"unknown target {target!r}; use mock, reference, "
                           "or http:CONFIG.json")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--target", required=True)
@click.option("--endpoint", default=None, help="Mock target URL.")
@click.option("--banned-lexicon", type=click.Path(exists=True), default=None)
@click.option("--threshold", default=0.9, show_default=True, type=float)
@click.option("--qps", default=None, type=float, help="Max submissions per second.")
@click.option("--concurrency", default=4, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Verdicts file (default: verdicts.json beside the manifest).")
def run(manifest_path, target, endpoint, banned_lexicon, threshold, qps,
        concurrency, out_path):
    """Submit every generated case to a moderation target."""
    manifest = harness.load_manifest(manifest_path)
    client = _make_client(target, endpoint, banned_lexicon, threshold)
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    verdicts, failures = harness.run_suite(manifest, client, base_dir=base_dir,
                                           qps=qps, concurrency=concurrency)
    out_path = out_path or os.path.join(base_dir, "verdicts.json")
    harness.write_verdicts(out_path, verdicts, failures)
    click.echo(f"{len(verdicts)} verdicts, {len(failures)} transport failures "
               f"-> {out_path}")
    if failures:
        sys.exit(1)


@main.command()
@click.option("--verdicts", "verdicts_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]),
              default="markdown", show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Directory for the report and its figures; default stdout.")
def report(verdicts_path, manifest_path, fmt, out_dir):
    """Aggregate verdicts into the per-MR Error Finding Rate table."""
    manifest = harness.load_manifest(manifest_path)
    verdicts, failures = harness.load_verdicts(verdicts_path)
    rep = report_mod.compute_efr(verdicts, manifest, failures)
    payload = report_mod.write_report(rep, fmt)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        ext = "md" if fmt == "markdown" else "json"
        path = os.path.join(out_dir, f"report.{ext}")
        with open(path, "wb") as fh:
            fh.write(payload)
        figures = report_mod.render_report_figures(rep, out_dir)
        click.echo(f"report -> {path}" + (f" (+{len(figures)} figures)" if figures else ""))
    else:
        click.echo(payload.decode("utf-8"))


@main.command("export-retrain")
@click.option("--verdicts", "verdicts_path", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def export_retrain(verdicts_path, manifest_path, out_dir):
    """Export misclassified cases as an (image, text, label=toxic) dataset."""
    manifest = harness.load_manifest(manifest_path)
    verdicts, _failures = harness.load_verdicts(verdicts_path)
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    count = harness.export_retraining_set(manifest, verdicts, out_dir,
                                          base_dir=base_dir)
    click.echo(f"exported {count} retraining pairs -> {out_dir}/index.jsonl")


@main.command("mock-serve")
@click.option("--mode", type=click.Choice(["always_toxic", "always_benign", "sidecar"]),
              default="always_toxic", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
def mock_serve(mode, port, lexicon_path):
    """Run the local mock moderation service until interrupted."""
    words = lexicon.load_wordlist(lexicon_path) if lexicon_path else None
    server = MockModerationServer(mode=mode, port=port, lexicon=words)
    click.echo(f"mock moderation service ({mode}) on {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()


def cli_dispatch(argv=None) -> int:
    try:
        return main.main(args=argv, standalone_mode=False) or 0
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except SystemExit as exc:
        return int(exc.code or 0)
    except ModtestError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(cli_dispatch())
