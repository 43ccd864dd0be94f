"""Speech-level overview: TextRank keywords and the time-matrix payload."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ingest import Snippet
from .lexicon import LexiconSet
from .textfeats import ALL_KINDS, AUDIO_KINDS, TEXT_KINDS, FeatureAnnotation, is_content_token

DAMPING = 0.85
TOLERANCE = 1e-6
MAX_ITERATIONS = 100
WINDOW = 4
TOP_K = 5


@dataclass
class Keyword:
    text: str
    score: float
    snippet: int
    frequency: int = 1
    anchor_time_s: float = 0.0


@dataclass
class PunchlineRow:
    snippet: int
    time_s: float
    text_feature_count: int
    audio_feature_count: int
    kind_counts: dict[str, int]


@dataclass
class TimeMatrixSummary:
    duration_s: float
    punchlines: list[PunchlineRow]
    feature_totals: dict[str, int]
    keywords: list[Keyword]
    merged_bands: list[tuple[float, float, list[int]]]


# -- TextRank -----------------------------------------------------------------


def cooccurrence_graph(
    snippet: Snippet, lexicons: LexiconSet, window: int = WINDOW
) -> tuple[list[str], np.ndarray]:
    """Undirected co-occurrence graph over content words.

    Nodes are lemmas (surface norms when no lemma is known); an edge gains
    weight 1 for every in-sentence co-occurrence within the window.
    """
    sequences: list[list[str]] = []
    for sentence in snippet.sentences:
        seq = [
            (tok.lemma or tok.norm).lower()
            for tok in sentence.tokens
            if is_content_token(tok, lexicons) and tok.norm
        ]
        sequences.append(seq)
    nodes: list[str] = []
    index: dict[str, int] = {}
    for seq in sequences:
        for w in seq:
            if w not in index:
                index[w] = len(nodes)
                nodes.append(w)
    weights = np.zeros((len(nodes), len(nodes)))
    for seq in sequences:
        for i in range(len(seq)):
            for j in range(i + 1, min(i + window, len(seq))):
                a, b = index[seq[i]], index[seq[j]]
                if a != b:
                    weights[a, b] += 1.0
                    weights[b, a] += 1.0
    return nodes, weights


def textrank_scores(
    weights: np.ndarray,
    damping: float = DAMPING,
    tol: float = TOLERANCE,
    max_iter: int = MAX_ITERATIONS,
) -> np.ndarray:
    """Weighted PageRank iteration until max per-node delta < tol."""
    n = len(weights)
    if n == 0:
        return np.zeros(0)
    degree = weights.sum(axis=1)
    scores = np.full(n, 1.0 / n)
    safe_degree = np.where(degree > 0, degree, 1.0)
    for _ in range(max_iter):
        spread = weights.T @ (scores / safe_degree)
        updated = (1.0 - damping) / n + damping * spread
        if float(np.max(np.abs(updated - scores))) < tol:
            scores = updated
            break
        scores = updated
    return scores


def extract_keywords(
    snippet: Snippet,
    lexicons: LexiconSet,
    top_k: int = TOP_K,
    window: int = WINDOW,
    damping: float = DAMPING,
) -> list[Keyword]:
    nodes, weights = cooccurrence_graph(snippet, lexicons, window)
    if not nodes:
        return []
    scores = textrank_scores(weights, damping)
    peak = float(scores.max())
    normalized = {w: float(s) / peak for w, s in zip(nodes, scores)} if peak > 0 else {}

    pool_size = max(top_k, (len(nodes) + 2) // 3)
    pool = set(sorted(nodes, key=lambda w: -normalized.get(w, 0.0))[:pool_size])

    # merge adjacent pool words into 2-word keywords
    merged: dict[str, float] = {}
    absorbed: set[str] = set()
    for sentence in snippet.sentences:
        content = [
            (i, (tok.lemma or tok.norm).lower())
            for i, tok in enumerate(sentence.tokens)
            if is_content_token(tok, lexicons) and tok.norm
        ]
        for (i, a), (j, b) in zip(content, content[1:]):
            if j == i + 1 and a in pool and b in pool and a != b:
                merged.setdefault(f"{a} {b}", normalized[a] + normalized[b])
                absorbed.update((a, b))

    candidates = [Keyword(text=t, score=s, snippet=snippet.index) for t, s in merged.items()]
    candidates += [
        Keyword(text=w, score=normalized[w], snippet=snippet.index)
        for w in pool
        if w not in absorbed
    ]
    candidates.sort(key=lambda k: (-k.score, k.text))
    return candidates[:top_k]


def keyword_occurrences(
    snippets: list[Snippet], keyword_text: str
) -> list[tuple[int, int, int]]:
    """Time-ordered (snippet, sentence, token) positions of a keyword.

    Matches are case-insensitive on lemma or surface norm; multiword
    keywords match consecutive tokens.
    """
    parts = keyword_text.lower().split()
    hits: list[tuple[float, tuple[int, int, int]]] = []
    for snippet in snippets:
        for sentence in snippet.sentences:
            tokens = sentence.tokens
            for i in range(len(tokens) - len(parts) + 1):
                if all(
                    parts[k] in (tokens[i + k].norm, (tokens[i + k].lemma or "").lower())
                    for k in range(len(parts))
                ):
                    hits.append(
                        (
                            tokens[i].start_s,
                            (snippet.index, sentence.sentence_index or 0, i),
                        )
                    )
    hits.sort(key=lambda h: h[0])
    return [pos for _, pos in hits]


def annotate_keyword_stats(
    keywords: list[Keyword], snippets: list[Snippet]
) -> list[Keyword]:
    """Fill whole-speech frequency and first-occurrence anchor time."""
    for kw in keywords:
        positions = keyword_occurrences(snippets, kw.text)
        kw.frequency = max(len(positions), 1)
        if positions:
            sn, sent, tok = positions[0]
            snippet = next(s for s in snippets if s.index == sn)
            kw.anchor_time_s = snippet.sentences[sent].tokens[tok].start_s
    return keywords


# -- time matrix -----------------------------------------------------------------


def build_time_matrix(
    duration_s: float,
    snippet_punchline_annotations: list[tuple[int, float, list[FeatureAnnotation]]],
    keywords: list[Keyword],
    merge_resolution_s: float = 0.0,
) -> TimeMatrixSummary:
    """One row per punchline: (snippet index, punchline end time, annotations)."""
    rows: list[PunchlineRow] = []
    for snippet_idx, time_s, annotations in snippet_punchline_annotations:
        counts = {kind: 0 for kind in ALL_KINDS}
        for ann in annotations:
            counts[ann.kind] += 1
        rows.append(
            PunchlineRow(
                snippet=snippet_idx,
                time_s=time_s,
                text_feature_count=sum(counts[k] for k in TEXT_KINDS),
                audio_feature_count=sum(counts[k] for k in AUDIO_KINDS),
                kind_counts=counts,
            )
        )
    rows.sort(key=lambda r: r.time_s)
    totals = {kind: sum(r.kind_counts[kind] for r in rows) for kind in ALL_KINDS}

    bands: list[tuple[float, float, list[int]]] = []
    for row in rows:
        if bands and row.time_s - bands[-1][1] < merge_resolution_s:
            start, _, members = bands.pop()
            bands.append((start, row.time_s, members + [row.snippet]))
        else:
            bands.append((row.time_s, row.time_s, [row.snippet]))

    return TimeMatrixSummary(
        duration_s=duration_s,
        punchlines=rows,
        feature_totals=totals,
        keywords=keywords,
        merged_bands=bands,
    )
