"""Sentence-level verbal humor features.

Covers incongruity (disconnection and intra-sentence repetition), sentiment
(polarity and subjectivity), and phonetic style (alliteration and rhyme
chains). Every detector is pure given (sentence, lexicons, config).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ValidationError
from .ingest import Sentence, WordToken
from .lexicon import LexiconSet, cosine_similarity

TEXT_KINDS = (
    "disconnection",
    "intra_repetition",
    "polarity",
    "subjectivity",
    "alliteration",
    "rhyme",
)
AUDIO_KINDS = ("faster", "slower", "pause", "louder", "softer", "stress")
ALL_KINDS = TEXT_KINDS + AUDIO_KINDS

_CONTENT_UPOS = {"NOUN", "PROPN", "VERB", "ADJ", "ADV"}
_CONTENT_PTB_PREFIX = ("N", "V", "J", "R")
_STRESS_RE = re.compile(r"\d")

# MPQA-style coarse tags to UPOS
_CLUE_POS = {
    "adj": {"ADJ"},
    "noun": {"NOUN", "PROPN"},
    "verb": {"VERB", "AUX"},
    "adverb": {"ADV"},
}


@dataclass(frozen=True)
class FeatureAnnotation:
    kind: str
    targets: tuple[int, ...]  # word indices within the sentence, increasing
    magnitude: float
    sentence_flag: bool = False

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValidationError(f"unknown annotation kind {self.kind!r}")
        if not self.targets or list(self.targets) != sorted(set(self.targets)):
            raise ValidationError("annotation targets must be non-empty and increasing")


@dataclass(frozen=True)
class ThresholdConfig:
    disconnect_max_sim: float = 0.15
    repeat_min_sim: float = 0.85
    speed_N: float = 1.0
    speed_M: float = 1.5
    pause_min_s: float = 0.5
    volume_delta_db: float = 3.0
    pitch_M: float = 1.5
    cluster_eps: float = 0.35
    cluster_min_pts: int = 2

    def validate(self) -> "ThresholdConfig":
        numeric = {
            k: getattr(self, k)
            for k in (
                "disconnect_max_sim",
                "repeat_min_sim",
                "speed_N",
                "speed_M",
                "pause_min_s",
                "volume_delta_db",
                "pitch_M",
                "cluster_eps",
            )
        }
        for name, value in numeric.items():
            if not value > 0:
                raise ValidationError(f"threshold {name} must be positive")
        if self.cluster_min_pts < 1:
            raise ValidationError("cluster_min_pts must be >= 1")
        if not self.disconnect_max_sim < self.repeat_min_sim:
            raise ValidationError("disconnect_max_sim must be below repeat_min_sim")
        return self


def is_content_token(token: WordToken, lexicons: LexiconSet) -> bool:
    """Nouns/verbs/adjectives/adverbs; without POS, any non-stopword token."""
    if token.pos:
        pos = token.pos.upper()
        return pos in _CONTENT_UPOS or (
            pos not in {"PRON", "DET", "ADP", "AUX", "PART", "INTJ", "PUNCT",
                        "CCONJ", "SCONJ", "SYM", "NUM", "X"}
            and pos.startswith(_CONTENT_PTB_PREFIX)
        )
    return bool(token.norm) and not lexicons.is_stopword(token.norm)


def _vector_pairs(sentence: Sentence, lexicons: LexiconSet):
    """Indices and vectors of in-vocabulary content words."""
    out = []
    for i, tok in enumerate(sentence.tokens):
        if not is_content_token(tok, lexicons):
            continue
        vec = lexicons.vector_of(tok.norm)
        if vec is not None:
            out.append((i, tok.norm, vec))
    return out


def detect_disconnection(
    sentence: Sentence, lexicons: LexiconSet, config: ThresholdConfig
) -> FeatureAnnotation | None:
    """The least semantically similar content-word pair, if weak enough."""
    candidates = _vector_pairs(sentence, lexicons)
    best: tuple[float, int, int] | None = None
    for a in range(len(candidates)):
        for b in range(a + 1, len(candidates)):
            i, _, u = candidates[a]
            j, _, v = candidates[b]
            sim = cosine_similarity(u, v)
            if best is None or sim < best[0]:
                best = (sim, i, j)
    if best is None or best[0] > config.disconnect_max_sim:
        return None
    return FeatureAnnotation(
        kind="disconnection",
        targets=(best[1], best[2]),
        magnitude=best[0],
        sentence_flag=True,
    )


def detect_intra_repetition(
    sentence: Sentence, lexicons: LexiconSet, config: ThresholdConfig
) -> FeatureAnnotation | None:
    """The most similar content-word pair; identical words count as 1.0."""
    content = [
        (i, tok.norm)
        for i, tok in enumerate(sentence.tokens)
        if is_content_token(tok, lexicons) and tok.norm
    ]
    vectors = {norm: lexicons.vector_of(norm) for _, norm in content}
    best: tuple[float, int, int] | None = None
    for a in range(len(content)):
        for b in range(a + 1, len(content)):
            i, wi = content[a]
            j, wj = content[b]
            if wi == wj:
                sim = 1.0
            elif vectors[wi] is not None and vectors[wj] is not None:
                sim = cosine_similarity(vectors[wi], vectors[wj])
            else:
                continue
            if best is None or sim > best[0]:
                best = (sim, i, j)
    if best is None or best[0] < config.repeat_min_sim:
        return None
    return FeatureAnnotation(
        kind="intra_repetition",
        targets=(best[1], best[2]),
        magnitude=best[0],
        sentence_flag=True,
    )


def annotate_sentiment(
    sentence: Sentence, lexicons: LexiconSet
) -> list[FeatureAnnotation]:
    annotations: list[FeatureAnnotation] = []
    any_strong = False
    matches: list[tuple[int, object]] = []
    for i, tok in enumerate(sentence.tokens):
        for clue in lexicons.clues_for(tok.norm):
            if clue.pos and tok.pos and tok.pos.upper() not in _CLUE_POS.get(
                clue.pos, {clue.pos.upper()}
            ):
                continue
            matches.append((i, clue))
            if clue.strength == "strong":
                any_strong = True
            break
    for i, clue in matches:
        strength = 1.0 if clue.strength == "strong" else 0.5
        if clue.polarity in ("positive", "negative"):
            sign = 1.0 if clue.polarity == "positive" else -1.0
            annotations.append(
                FeatureAnnotation(
                    kind="polarity",
                    targets=(i,),
                    magnitude=sign * strength,
                    sentence_flag=any_strong,
                )
            )
        if clue.subjective:
            annotations.append(
                FeatureAnnotation(
                    kind="subjectivity",
                    targets=(i,),
                    magnitude=strength,
                    sentence_flag=any_strong,
                )
            )
    return annotations


def _strip_stress(phone: str) -> str:
    return _STRESS_RE.sub("", phone)


def detect_alliteration(
    sentence: Sentence, lexicons: LexiconSet
) -> list[FeatureAnnotation]:
    """Chains of words sharing a first phone (stress ignored)."""
    groups: dict[str, list[int]] = {}
    for i, tok in enumerate(sentence.tokens):
        phones = tok.phones or lexicons.phones_of(tok.norm)
        if phones:
            groups.setdefault(_strip_stress(phones[0]), []).append(i)
    chains = []
    for indices in groups.values():
        if len(indices) < 2:
            continue
        if len({sentence.tokens[i].norm for i in indices}) < 2:
            continue  # pure repetition is the repetition feature's job
        chains.append(
            FeatureAnnotation(
                kind="alliteration",
                targets=tuple(indices),
                magnitude=float(len(indices)),
            )
        )
    chains.sort(key=lambda a: a.targets[0])
    return chains


def rhyme_key(phones: tuple[str, ...]) -> tuple[str, ...] | None:
    """Phones from the last stressed vowel onward, stress digits removed."""
    last = None
    for i, p in enumerate(phones):
        if p[-1:] in ("1", "2"):
            last = i
    if last is None:
        for i, p in enumerate(phones):
            if _STRESS_RE.search(p):
                last = i
    if last is None:
        return None
    return tuple(_strip_stress(p) for p in phones[last:])


def detect_rhyme(sentence: Sentence, lexicons: LexiconSet) -> list[FeatureAnnotation]:
    groups: dict[tuple[str, ...], list[int]] = {}
    for i, tok in enumerate(sentence.tokens):
        phones = tok.phones or lexicons.phones_of(tok.norm)
        if not phones:
            continue
        key = rhyme_key(tuple(phones))
        if key:
            groups.setdefault(key, []).append(i)
    chains = []
    for indices in groups.values():
        if len(indices) < 2:
            continue
        if len({sentence.tokens[i].norm for i in indices}) < 2:
            continue
        chains.append(
            FeatureAnnotation(
                kind="rhyme",
                targets=tuple(indices),
                magnitude=float(len(indices)),
            )
        )
    chains.sort(key=lambda a: a.targets[0])
    return chains


def annotate_sentence_text(
    sentence: Sentence, lexicons: LexiconSet, config: ThresholdConfig
) -> list[FeatureAnnotation]:
    """All five textual detectors, stably ordered by (kind, first target)."""
    annotations: list[FeatureAnnotation] = []
    if (d := detect_disconnection(sentence, lexicons, config)) is not None:
        annotations.append(d)
    if (r := detect_intra_repetition(sentence, lexicons, config)) is not None:
        annotations.append(r)
    annotations.extend(annotate_sentiment(sentence, lexicons))
    annotations.extend(detect_alliteration(sentence, lexicons))
    annotations.extend(detect_rhyme(sentence, lexicons))
    annotations.sort(key=lambda a: (a.kind, a.targets[0]))
    return annotations
