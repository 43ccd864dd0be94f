"""HTTP/JSON query surface over a speech store."""
from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Query, Request, Response, UploadFile

from . import pipeline, queries
from .errors import NotFoundError, ValidationError
from .lexicon import LexiconSet, load_resources
from .pipeline import BundlePaths, PipelineConfig
from .queries import HumorFocusFilter
from .store import SpeechStore


def create_app(store: SpeechStore, lexicons: LexiconSet | None = None) -> FastAPI:
    lexicons = lexicons or load_resources()
    app = FastAPI(title="punchkit")

    @app.exception_handler(ValidationError)
    async def _validation(_req: Request, exc: ValidationError):
        return Response(
            content=json.dumps({"error": str(exc), "stage": exc.stage}),
            status_code=422,
            media_type="application/json",
        )

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError):
        return Response(
            content=json.dumps({"error": str(exc)}),
            status_code=404,
            media_type="application/json",
        )

    @app.get("/speeches")
    def list_speeches(sort: str = "laughter_count"):
        return queries.speech_listing(store, sort)

    @app.post("/speeches", status_code=201)
    async def ingest_speech(
        transcript: UploadFile = File(...),
        alignment: UploadFile = File(...),
        audio: UploadFile = File(...),
        meta: UploadFile = File(...),
        parses: UploadFile | None = File(None),
        coref: UploadFile | None = File(None),
        phrase_vectors: UploadFile | None = File(None),
        speech_id: str | None = Form(None),
        config: str | None = Form(None),
    ):
        cfg = (
            PipelineConfig.from_dict(json.loads(config))
            if config
            else PipelineConfig()
        )
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            names = {
                "transcript.txt": transcript,
                "alignment.csv": alignment,
                "audio.wav": audio,
                "meta.txt": meta,
                "parses.conllu": parses,
                "coref.txt": coref,
                "phrase_vectors.csv": phrase_vectors,
            }
            for name, upload in names.items():
                if upload is not None:
                    (root / name).write_bytes(await upload.read())
            doc, wav = pipeline.process_bundle(
                BundlePaths.from_dir(root), lexicons, cfg
            )
        sid = speech_id or doc["meta"]["id"] or store.new_id()
        store.save(sid, doc, wav)
        return {"id": sid, "revision": doc["revision"]}

    @app.get("/speeches/{speech_id}/summary")
    def get_summary(speech_id: str, merge_resolution_s: float | None = None):
        return queries.summary_payload(store.load(speech_id), merge_resolution_s)

    @app.get("/speeches/{speech_id}/snippets")
    def get_snippets(
        speech_id: str,
        min_context: int | None = None,
        max_context: int | None = None,
        kinds: list[str] = Query(default=[]),
        keyword: str | None = None,
    ):
        # each `kinds` value is one any-of group, comma-separated
        groups = tuple(
            tuple(k.strip() for k in group.split(",") if k.strip()) for group in kinds
        )
        focus = HumorFocusFilter(
            min_context=min_context,
            max_context=max_context,
            kind_groups=tuple(g for g in groups if g),
            keyword=keyword,
        )
        return {"snippets": queries.filter_snippets(store.load(speech_id), focus)}

    @app.get("/speeches/{speech_id}/snippets/{snippet_index}")
    def get_snippet(speech_id: str, snippet_index: int):
        return queries.snippet_detail(store.load(speech_id), snippet_index)

    @app.get("/speeches/{speech_id}/snippets/{snippet_index}/audio/{sentence_index}")
    def get_audio(speech_id: str, snippet_index: int, sentence_index: int):
        doc = store.load(speech_id)
        if not doc.get("audio", {}).get("retained"):
            raise HTTPException(status_code=410, detail="audio not retained")
        wav = queries.audio_clip(
            doc, store.load_audio(speech_id), snippet_index, sentence_index
        )
        return Response(content=wav, media_type="audio/wav")

    @app.post("/speeches/{speech_id}/recompute")
    def recompute(speech_id: str, config: dict):
        doc = store.load(speech_id)
        merged = dict(doc["config"])
        merged.update(config)
        new_doc = pipeline.recompute_document(
            doc, lexicons, PipelineConfig.from_dict(merged)
        )
        store.save(speech_id, new_doc)
        return {"id": speech_id, "revision": new_doc["revision"]}

    return app
