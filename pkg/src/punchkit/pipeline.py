"""End-to-end processing of a speech bundle into a self-contained document.

The document is a plain JSON-serializable dict carrying everything the query
surface needs: tokens with timings, per-sentence annotations, per-word
acoustics, context graphs, keywords, and the parses/coref chains needed to
re-run detectors under a new threshold config without touching the audio.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import audiofeats, contextgraph, ingest, summary, textfeats
from .errors import ValidationError
from .ingest import AudioTrack, Sentence, Snippet, SpeechMeta, WordToken
from .lexicon import LexiconSet, load_phrase_overrides
from .textfeats import FeatureAnnotation, ThresholdConfig

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    textrank_window: int = summary.WINDOW
    textrank_damping: float = summary.DAMPING
    textrank_top_k: int = summary.TOP_K
    max_subphrase_len: int = contextgraph.MAX_SUBPHRASE_LEN
    merge_resolution_s: float = 2.0

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self.thresholds)
        d.update(
            textrank_window=self.textrank_window,
            textrank_damping=self.textrank_damping,
            textrank_top_k=self.textrank_top_k,
            max_subphrase_len=self.max_subphrase_len,
            merge_resolution_s=self.merge_resolution_s,
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        thresholds = ThresholdConfig(
            **{
                f.name: d[f.name]
                for f in dataclasses.fields(ThresholdConfig)
                if f.name in d
            }
        ).validate()
        kwargs = {
            name: d[name]
            for name in (
                "textrank_window",
                "textrank_damping",
                "textrank_top_k",
                "max_subphrase_len",
                "merge_resolution_s",
            )
            if name in d
        }
        return cls(thresholds=thresholds, **kwargs)


@dataclass
class BundlePaths:
    transcript: Path
    alignment: Path
    audio: Path
    meta: Path
    conllu: Path | None = None
    coref: Path | None = None
    phrase_vectors: Path | None = None

    @classmethod
    def from_dir(cls, bundle_dir: Path) -> "BundlePaths":
        bundle_dir = Path(bundle_dir)

        def required(name: str) -> Path:
            p = bundle_dir / name
            if not p.exists():
                raise ValidationError(f"bundle missing {name}", stage="ingest")
            return p

        def optional(name: str) -> Path | None:
            p = bundle_dir / name
            return p if p.exists() else None

        return cls(
            transcript=required("transcript.txt"),
            alignment=required("alignment.csv"),
            audio=required("audio.wav"),
            meta=required("meta.txt"),
            conllu=optional("parses.conllu"),
            coref=optional("coref.txt"),
            phrase_vectors=optional("phrase_vectors.csv"),
        )


def _with_overrides(lexicons: LexiconSet, path: Path | None) -> LexiconSet:
    if path is None:
        return lexicons
    overrides = load_phrase_overrides(path, lexicons.dim)
    return LexiconSet(
        lexicons.pronunciations,
        lexicons.clues,
        lexicons.vectors,
        lexicons.dim,
        lexicons.stopwords,
        overrides,
    )


def _attach_parse_info(
    sentences: list[Sentence], trees: list[contextgraph.DependencyTree]
) -> None:
    for sentence, tree in zip(sentences, trees):
        if len(tree) != len(sentence.tokens):
            raise ValidationError(
                f"sentence {sentence.index}: parse has {len(tree)} tokens, "
                f"transcript has {len(sentence.tokens)}",
                stage="context-graph",
            )
        for tok, pos, lemma in zip(sentence.tokens, tree.upos, tree.lemmas):
            tok.pos = pos
            tok.lemma = None if lemma in ("_", "") else lemma


def _annotate_snippet(
    snippet: Snippet,
    frames: audiofeats.FrameSeries,
    lexicons: LexiconSet,
    config: PipelineConfig,
) -> tuple[list[list[FeatureAnnotation]], list[list[audiofeats.WordAcoustics]]]:
    thresholds = config.thresholds
    per_sentence: list[list[FeatureAnnotation]] = []
    acoustics: list[list[audiofeats.WordAcoustics]] = []
    for sentence in snippet.sentences:
        ann = list(textfeats.annotate_sentence_text(sentence, lexicons, thresholds))
        word_ac = audiofeats.sentence_acoustics(sentence, frames)
        ann += audiofeats.detect_speed_variation(sentence, word_ac, thresholds)
        ann += audiofeats.detect_volume_variation(sentence, word_ac, thresholds)
        ann += audiofeats.detect_pitch_stress(sentence, word_ac, thresholds)
        per_sentence.append(ann)
        acoustics.append(word_ac)
    # pauses run across the whole snippet, including sentence boundaries
    flat = [
        (pos, i, tok)
        for pos, sentence in enumerate(snippet.sentences)
        for i, tok in enumerate(sentence.tokens)
    ]
    for pos, pause in audiofeats.detect_pauses(flat, thresholds):
        per_sentence[pos].append(pause)
    for ann in per_sentence:
        ann.sort(key=lambda a: (a.kind, a.targets[0]))
    return per_sentence, acoustics


def process_bundle(
    paths: BundlePaths, lexicons: LexiconSet, config: PipelineConfig | None = None
) -> tuple[dict, bytes]:
    """Run the full pipeline; returns (document dict, mono WAV bytes)."""
    config = config or PipelineConfig()
    config.thresholds.validate()
    lexicons = _with_overrides(lexicons, paths.phrase_vectors)

    try:
        meta, sentences, events, track = ingest.parse_bundle(
            paths.transcript.read_bytes(),
            paths.alignment.read_bytes(),
            paths.audio.read_bytes(),
            paths.meta.read_bytes(),
            lexicons,
        )
        snippets = ingest.segment_snippets(sentences, events)
        tail = ingest.tail_sentences(sentences, events)
    except ValidationError as exc:
        raise ValidationError(str(exc), stage="ingest") from exc

    trees = None
    try:
        if paths.conllu is not None:
            trees = contextgraph.parse_conllu(
                paths.conllu.read_text(), expected_sentences=len(sentences)
            )
            _attach_parse_info(sentences, trees)
        chains = (
            contextgraph.parse_coref_chains(paths.coref.read_text())
            if paths.coref is not None
            else None
        )
    except ValidationError as exc:
        raise ValidationError(str(exc), stage=exc.stage or "context-graph") from exc

    frames = audiofeats.analyze_frames(track)

    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "revision": 1,
        "meta": dataclasses.asdict(meta),
        "config": config.to_dict(),
        "laughter_times": [e.time_s for e in events],
        "snippets": [],
        "tail_sentences": [_sentence_dict(s) for s in tail],
        "parses": [dataclasses.asdict(t) for t in trees] if trees else None,
        "coref_chains": (
            [
                {"representative": c.representative, "mentions": [list(m) for m in c.mentions]}
                for c in chains
            ]
            if chains
            else None
        ),
        "phrase_overrides": {
            k: [float(x) for x in v] for k, v in lexicons.phrase_overrides.items()
        }
        or None,
        "audio": {"sample_rate": track.sample_rate, "retained": True},
    }

    for snippet in snippets:
        annotations, acoustics = _annotate_snippet(snippet, frames, lexicons, config)
        snippet_trees = (
            [trees[s.index] for s in snippet.sentences] if trees is not None else None
        )
        graph = contextgraph.build_context_graph(
            snippet, snippet_trees, chains, lexicons, config.thresholds,
            config.max_subphrase_len,
        )
        keywords = summary.extract_keywords(
            snippet,
            lexicons,
            top_k=config.textrank_top_k,
            window=config.textrank_window,
            damping=config.textrank_damping,
        )
        doc["snippets"].append(
            _snippet_dict(snippet, annotations, acoustics, graph, keywords)
        )

    _finalize_keywords(doc)
    return doc, ingest.encode_wav(track)


def recompute_document(
    doc: dict, lexicons: LexiconSet, config: PipelineConfig
) -> dict:
    """Re-run detectors, clustering, and keywords under a new config.

    Segmentation, timings, acoustics, and parses come from the stored
    document; the audio is not needed.
    """
    config.thresholds.validate()
    overrides = doc.get("phrase_overrides")
    if overrides:
        lexicons = LexiconSet(
            lexicons.pronunciations,
            lexicons.clues,
            lexicons.vectors,
            lexicons.dim,
            lexicons.stopwords,
            {k: np.asarray(v) for k, v in overrides.items()},
        )
    snippets, acoustics_by_snippet = rebuild_snippets(doc)
    all_trees = (
        [
            contextgraph.DependencyTree(
                tuple(t["heads"]), tuple(t["rels"]), tuple(t["upos"]), tuple(t["lemmas"])
            )
            for t in doc["parses"]
        ]
        if doc.get("parses")
        else None
    )
    chains = (
        [
            contextgraph.CorefChain(
                representative=c["representative"],
                mentions=tuple(tuple(m) for m in c["mentions"]),
            )
            for c in doc["coref_chains"]
        ]
        if doc.get("coref_chains")
        else None
    )

    new_doc = dict(doc)
    new_doc["revision"] = doc["revision"] + 1
    new_doc["config"] = config.to_dict()
    new_doc["snippets"] = []
    thresholds = config.thresholds
    for snippet, acoustics in zip(snippets, acoustics_by_snippet):
        per_sentence: list[list[FeatureAnnotation]] = []
        for sentence, word_ac in zip(snippet.sentences, acoustics):
            ann = list(textfeats.annotate_sentence_text(sentence, lexicons, thresholds))
            ann += audiofeats.detect_speed_variation(sentence, word_ac, thresholds)
            ann += audiofeats.detect_volume_variation(sentence, word_ac, thresholds)
            ann += audiofeats.detect_pitch_stress(sentence, word_ac, thresholds)
            per_sentence.append(ann)
        flat = [
            (pos, i, tok)
            for pos, sentence in enumerate(snippet.sentences)
            for i, tok in enumerate(sentence.tokens)
        ]
        for pos, pause in audiofeats.detect_pauses(flat, thresholds):
            per_sentence[pos].append(pause)
        for ann in per_sentence:
            ann.sort(key=lambda a: (a.kind, a.targets[0]))

        snippet_trees = (
            [all_trees[s.index] for s in snippet.sentences] if all_trees else None
        )
        graph = contextgraph.build_context_graph(
            snippet, snippet_trees, chains, lexicons, thresholds,
            config.max_subphrase_len,
        )
        keywords = summary.extract_keywords(
            snippet,
            lexicons,
            top_k=config.textrank_top_k,
            window=config.textrank_window,
            damping=config.textrank_damping,
        )
        new_doc["snippets"].append(
            _snippet_dict(snippet, per_sentence, acoustics, graph, keywords)
        )
    _finalize_keywords(new_doc)
    return new_doc


# -- document <-> object helpers ------------------------------------------------


def _token_dict(tok: WordToken) -> dict:
    return {
        "surface": tok.surface,
        "norm": tok.norm,
        "start_s": tok.start_s,
        "end_s": tok.end_s,
        "phones": list(tok.phones),
        "syllables": tok.syllables,
        "pos": tok.pos,
        "lemma": tok.lemma,
    }


def _sentence_dict(sentence: Sentence) -> dict:
    return {
        "index": sentence.index,
        "is_punchline": sentence.is_punchline,
        "span_s": list(sentence.span_s),
        "tokens": [_token_dict(t) for t in sentence.tokens],
    }


def _snippet_dict(snippet, annotations, acoustics, graph, keywords) -> dict:
    out = {
        "index": snippet.index,
        "span_s": list(snippet.span_s),
        "sentences": [],
        "context_graph": {
            "node_lengths": graph.node_lengths,
            "punchline": graph.punchline,
            "clusters": [
                {
                    "id": c.cluster_id,
                    "color": c.color,
                    "members": [
                        {
                            "sentence": m.sentence,
                            "first": m.first,
                            "last": m.last,
                            "text": m.text,
                            "substituted_text": m.substituted_text,
                        }
                        for m in c.members
                    ],
                }
                for c in graph.clusters
            ],
            "links": [list(l) for l in graph.links],
        },
        "keywords": [
            {
                "text": k.text,
                "score": k.score,
                "frequency": k.frequency,
                "anchor_time_s": k.anchor_time_s,
            }
            for k in keywords
        ],
    }
    for sentence, ann, word_ac in zip(snippet.sentences, annotations, acoustics):
        sent = _sentence_dict(sentence)
        sent["annotations"] = [
            {
                "kind": a.kind,
                "targets": list(a.targets),
                "magnitude": a.magnitude,
                "sentence_flag": a.sentence_flag,
            }
            for a in ann
        ]
        sent["acoustics"] = [
            {
                "spm": a.spm,
                "mean_rms": a.mean_rms,
                "mean_db": a.mean_db,
                "mean_f0": a.mean_f0,
                "f0_range": a.f0_range,
            }
            for a in word_ac
        ]
        out["sentences"].append(sent)
    return out


def rebuild_snippets(doc: dict) -> tuple[list[Snippet], list[list[list[audiofeats.WordAcoustics]]]]:
    """Reconstruct Snippet objects (and stored acoustics) from a document."""
    snippets: list[Snippet] = []
    acoustics: list[list[list[audiofeats.WordAcoustics]]] = []
    for sn in doc["snippets"]:
        sentences = []
        snippet_ac = []
        for pos, sd in enumerate(sn["sentences"]):
            tokens = [
                WordToken(
                    surface=t["surface"],
                    norm=t["norm"],
                    sent_index=i,
                    start_s=t["start_s"],
                    end_s=t["end_s"],
                    phones=tuple(t["phones"]),
                    syllables=t["syllables"],
                    pos=t.get("pos"),
                    lemma=t.get("lemma"),
                )
                for i, t in enumerate(sd["tokens"])
            ]
            sentences.append(
                Sentence(
                    index=sd["index"],
                    tokens=tokens,
                    is_punchline=sd["is_punchline"],
                    snippet_index=sn["index"],
                    sentence_index=pos,
                )
            )
            snippet_ac.append(
                [
                    audiofeats.WordAcoustics(
                        spm=a["spm"],
                        mean_rms=a["mean_rms"],
                        mean_db=a["mean_db"],
                        mean_f0=a["mean_f0"],
                        f0_range=a["f0_range"],
                    )
                    for a in sd["acoustics"]
                ]
            )
        snippets.append(Snippet(index=sn["index"], sentences=sentences))
        acoustics.append(snippet_ac)
    return snippets, acoustics


def _finalize_keywords(doc: dict) -> None:
    snippets, _ = rebuild_snippets(doc)
    for sn in doc["snippets"]:
        snippet = next(s for s in snippets if s.index == sn["index"])
        keywords = [
            summary.Keyword(
                text=k["text"], score=k["score"], snippet=sn["index"]
            )
            for k in sn["keywords"]
        ]
        summary.annotate_keyword_stats(keywords, snippets)
        for kd, kw in zip(sn["keywords"], keywords):
            kd["frequency"] = kw.frequency
            kd["anchor_time_s"] = kw.anchor_time_s


def document_summary(doc: dict, merge_resolution_s: float | None = None) -> summary.TimeMatrixSummary:
    rows = []
    for sn in doc["snippets"]:
        punchline = sn["sentences"][-1]
        annotations = [
            FeatureAnnotation(
                kind=a["kind"],
                targets=tuple(a["targets"]),
                magnitude=a["magnitude"],
                sentence_flag=a["sentence_flag"],
            )
            for a in punchline["annotations"]
        ]
        rows.append((sn["index"], punchline["span_s"][1], annotations))
    keywords = [
        summary.Keyword(
            text=k["text"],
            score=k["score"],
            snippet=sn["index"],
            frequency=k["frequency"],
            anchor_time_s=k["anchor_time_s"],
        )
        for sn in doc["snippets"]
        for k in sn["keywords"]
    ]
    resolution = (
        merge_resolution_s
        if merge_resolution_s is not None
        else doc["config"].get("merge_resolution_s", 0.0)
    )
    return summary.build_time_matrix(
        doc["meta"]["duration_s"], rows, keywords, resolution
    )
