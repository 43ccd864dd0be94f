"""Read-side operations over stored speech documents.

Everything here is a pure function of the document dict plus query
parameters, shared by the HTTP API and the CLI.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import ingest, pipeline
from .errors import NotFoundError, ValidationError
from .store import SpeechStore
from .textfeats import AUDIO_KINDS, TEXT_KINDS

SORT_KEYS = ("laughter_count", "views", "title", "duration")
_NUMERIC_KEYS = {"laughter_count", "views", "duration"}

ALL_KINDS = TEXT_KINDS + AUDIO_KINDS


@dataclass(frozen=True)
class HumorFocusFilter:
    """Narrows snippets by context length, punchline feature kinds, keyword.

    ``kind_groups`` is a tuple of groups; a punchline qualifies when it
    carries at least one annotation from every group (any-of within a
    group, all-of across groups).
    """

    min_context: int | None = None
    max_context: int | None = None
    kind_groups: tuple[tuple[str, ...], ...] = ()
    keyword: str | None = None

    def validate(self) -> "HumorFocusFilter":
        if (
            self.min_context is not None
            and self.max_context is not None
            and self.min_context > self.max_context
        ):
            raise ValidationError("min context length exceeds max")
        for group in self.kind_groups:
            for kind in group:
                if kind not in ALL_KINDS:
                    raise ValidationError(f"unknown annotation kind {kind!r}")
        return self


def speech_listing(store: SpeechStore, sort_key: str = "laughter_count") -> list[dict]:
    """Metadata plus normalized punchline-time barcode for every speech."""
    if sort_key not in SORT_KEYS:
        raise ValidationError(f"unknown sort key {sort_key!r}")
    rows = []
    for speech_id in store.list_ids():
        doc = store.load(speech_id)
        duration = doc["meta"]["duration_s"]
        times = [sn["sentences"][-1]["span_s"][1] for sn in doc["snippets"]]
        rows.append(
            {
                "id": speech_id,
                "meta": doc["meta"],
                "laughter_count": len(doc["snippets"]),
                "barcode": [t / duration for t in times] if duration > 0 else [],
                "revision": doc["revision"],
            }
        )
    if sort_key == "title":
        rows.sort(key=lambda r: r["meta"]["title"])
    elif sort_key == "views":
        rows.sort(key=lambda r: -r["meta"]["views"])
    elif sort_key == "duration":
        rows.sort(key=lambda r: -r["meta"]["duration_s"])
    else:
        rows.sort(key=lambda r: -r["laughter_count"])
    return rows


def filter_snippets(doc: dict, focus: HumorFocusFilter) -> list[int]:
    focus.validate()
    out = []
    for sn in doc["snippets"]:
        context_len = len(sn["sentences"]) - 1
        if focus.min_context is not None and context_len < focus.min_context:
            continue
        if focus.max_context is not None and context_len > focus.max_context:
            continue
        punchline_kinds = {a["kind"] for a in sn["sentences"][-1]["annotations"]}
        if any(not punchline_kinds.intersection(group) for group in focus.kind_groups):
            continue
        if focus.keyword is not None and not _keyword_in_snippet(sn, focus.keyword):
            continue
        out.append(sn["index"])
    return out


def _keyword_in_snippet(sn: dict, keyword: str) -> bool:
    parts = keyword.lower().split()
    for sd in sn["sentences"]:
        tokens = sd["tokens"]
        for i in range(len(tokens) - len(parts) + 1):
            if all(
                parts[k]
                in (tokens[i + k]["norm"], (tokens[i + k].get("lemma") or "").lower())
                for k in range(len(parts))
            ):
                return True
    return False


def snippet_detail(doc: dict, snippet_index: int) -> dict:
    for sn in doc["snippets"]:
        if sn["index"] == snippet_index:
            return sn
    raise NotFoundError(f"no snippet {snippet_index}")


def audio_clip(doc: dict, audio_bytes: bytes, snippet_index: int, sentence_index: int) -> bytes:
    sn = snippet_detail(doc, snippet_index)
    if not 0 <= sentence_index < len(sn["sentences"]):
        raise NotFoundError(f"no sentence {sentence_index} in snippet {snippet_index}")
    span = tuple(sn["sentences"][sentence_index]["span_s"])
    track = ingest.parse_wav(audio_bytes)
    return ingest.encode_wav(ingest.clip_audio(track, span))


def summary_payload(doc: dict, merge_resolution_s: float | None = None) -> dict:
    tm = pipeline.document_summary(doc, merge_resolution_s)
    return {
        "duration_s": tm.duration_s,
        "punchlines": [
            {
                "snippet": r.snippet,
                "time_s": r.time_s,
                "text_feature_count": r.text_feature_count,
                "audio_feature_count": r.audio_feature_count,
                "kind_counts": r.kind_counts,
            }
            for r in tm.punchlines
        ],
        "feature_totals": tm.feature_totals,
        "keywords": [
            {
                "text": k.text,
                "score": k.score,
                "snippet": k.snippet,
                "frequency": k.frequency,
                "anchor_time_s": k.anchor_time_s,
            }
            for k in tm.keywords
        ],
        "merged_bands": [
            {"start_s": s, "end_s": e, "snippets": members}
            for s, e, members in tm.merged_bands
        ],
    }
