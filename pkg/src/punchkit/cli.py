"""Command-line entry points: batch ingest, listing, terminal annotation
rendering, report rendering, recompute, and the HTTP server."""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import pipeline, queries, report
from .errors import NotFoundError, PunchkitError, ValidationError
from .lexicon import load_resources
from .pipeline import BundlePaths, PipelineConfig
from .store import SpeechStore

_GLYPHS = {
    "disconnection": "~",
    "intra_repetition": "=",
    "polarity": "+",
    "subjectivity": "?",
    "alliteration": "a",
    "rhyme": "r",
    "faster": ">",
    "slower": "<",
    "pause": "_",
    "louder": "^",
    "softer": "v",
    "stress": "*",
}


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, NotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except PunchkitError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.option(
    "--store",
    "store_dir",
    type=click.Path(path_type=Path),
    default=Path("speeches"),
    envvar="PUNCHKIT_STORE",
    show_default=True,
    help="Directory holding stored speech documents.",
)
@click.pass_context
def main(ctx: click.Context, store_dir: Path) -> None:
    ctx.obj = SpeechStore(store_dir)


@main.command()
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--id", "speech_id", default=None, help="Speech id (defaults to metadata id).")
@click.option("--config", "config_json", default=None, help="JSON threshold overrides.")
@click.pass_obj
@_handle_errors
def ingest(store: SpeechStore, bundle_dir: Path, speech_id: str | None, config_json: str | None):
    """Process a speech bundle directory and persist the document."""
    cfg = PipelineConfig.from_dict(json.loads(config_json)) if config_json else PipelineConfig()
    doc, wav = pipeline.process_bundle(BundlePaths.from_dir(bundle_dir), load_resources(), cfg)
    sid = speech_id or doc["meta"]["id"]
    store.save(sid, doc, wav)
    click.echo(sid)


@main.command(name="list")
@click.option("--sort", "sort_key", default="laughter_count", show_default=True)
@click.pass_obj
@_handle_errors
def list_cmd(store: SpeechStore, sort_key: str):
    """List stored speeches with punchline counts."""
    for row in queries.speech_listing(store, sort_key):
        meta = row["meta"]
        click.echo(
            f"{row['id']}\t{meta['title']}\t{meta['speaker']}\t"
            f"{row['laughter_count']} punchlines\t{meta['duration_s']:.1f}s"
        )


@main.command()
@click.argument("speech_id")
@click.option("--snippet", "snippet_index", type=int, default=None, help="Limit to one snippet.")
@click.option("--print", "do_print", is_flag=True, default=True, help="Render to the terminal.")
@click.pass_obj
@_handle_errors
def annotate(store: SpeechStore, speech_id: str, snippet_index: int | None, do_print: bool):
    """Render inline annotations for a stored speech."""
    doc = store.load(speech_id)
    for sn in doc["snippets"]:
        if snippet_index is not None and sn["index"] != snippet_index:
            continue
        click.echo(f"snippet {sn['index']}")
        for sd in sn["sentences"]:
            marks: dict[int, list[str]] = {}
            for ann in sd["annotations"]:
                for target in ann["targets"]:
                    marks.setdefault(target, []).append(_GLYPHS[ann["kind"]])
            rendered = [
                tok["surface"] + ("".join(marks[i]) if i in marks else "")
                for i, tok in enumerate(sd["tokens"])
            ]
            tag = "punchline> " if sd["is_punchline"] else "           "
            click.echo(tag + " ".join(rendered))
        click.echo("")


@main.command()
@click.argument("speech_id")
@click.option("--config", "config_json", required=True, help="JSON threshold overrides.")
@click.pass_obj
@_handle_errors
def recompute(store: SpeechStore, speech_id: str, config_json: str):
    """Re-run detectors and clustering under a new threshold config."""
    doc = store.load(speech_id)
    merged = dict(doc["config"])
    merged.update(json.loads(config_json))
    new_doc = pipeline.recompute_document(doc, load_resources(), PipelineConfig.from_dict(merged))
    store.save(speech_id, new_doc)
    click.echo(f"{speech_id} revision {new_doc['revision']}")


@main.command(name="report")
@click.argument("speech_id")
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Output directory [default: report-<id>].",
)
@click.pass_obj
@_handle_errors
def report_cmd(store: SpeechStore, speech_id: str, out_dir: Path | None):
    """Write CSV summaries and figure files for a stored speech."""
    doc = store.load(speech_id)
    out_dir = out_dir or Path(f"report-{speech_id}")
    for path in report.write_report(doc, out_dir):
        click.echo(str(path))


@main.command()
@click.argument("out_dir", type=click.Path(path_type=Path), default=Path("bundles"))
@_handle_errors
def demo(out_dir: Path):
    """Write the two bundled demo speech bundles to OUT_DIR."""
    from .demo import write_demo_bundles

    for bundle_id, path in write_demo_bundles(out_dir).items():
        click.echo(f"{bundle_id}\t{path}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_obj
def serve(store: SpeechStore, port: int, host: str):
    """Run the HTTP query API."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(store), host=host, port=port)


if __name__ == "__main__":
    main()
