"""Lexical resources: pronunciation lexicon, sentiment clues, and word vectors.

All lookups are case-insensitive. A loaded :class:`LexiconSet` is immutable
and safe to share across workers.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError

VOWEL_LETTERS = set("aeiouy")
_STRESS_RE = re.compile(r"\d")
STRIP_CHARS = "\"'.,;:!?()[]{}<>`“”‘’…—-"

POLARITIES = {"positive", "negative", "neutral", "both"}


@dataclass(frozen=True)
class SentimentClue:
    word: str
    pos: str | None
    polarity: str
    strength: str  # "strong" | "weak"
    subjective: bool


def default_resource_dir() -> Path:
    return Path(str(resources.files("punchkit").joinpath("data")))


def load_stopwords(path: Path | None = None) -> frozenset[str]:
    path = path or default_resource_dir() / "stopwords.txt"
    return frozenset(
        line.strip().lower() for line in path.read_text().splitlines() if line.strip()
    )


class LexiconSet:
    """Read-only bundle of the three lexical resources plus the stopword list."""

    def __init__(
        self,
        pronunciations: dict[str, tuple[str, ...]],
        clues: dict[str, list[SentimentClue]],
        vectors: dict[str, np.ndarray],
        dim: int,
        stopwords: frozenset[str],
        phrase_overrides: dict[str, np.ndarray] | None = None,
    ):
        self.pronunciations = pronunciations
        self.clues = clues
        self.vectors = vectors
        self.dim = dim
        self.stopwords = stopwords
        self.phrase_overrides = phrase_overrides or {}

    # -- pronunciation ----------------------------------------------------

    def phones_of(self, word: str) -> tuple[str, ...] | None:
        if not word:
            return None
        return self.pronunciations.get(word.lower())

    def syllable_count(self, word: str) -> int:
        phones = self.phones_of(word)
        if phones is not None:
            n = sum(1 for p in phones if _STRESS_RE.search(p))
            return max(n, 1)
        return heuristic_syllables(word)

    # -- sentiment ---------------------------------------------------------

    def clues_for(self, word: str) -> list[SentimentClue]:
        return self.clues.get(word.lower(), [])

    # -- vectors -----------------------------------------------------------

    def vector_of(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.lower())

    def is_stopword(self, word: str) -> bool:
        return word.lower() in self.stopwords

    def phrase_vector(self, tokens: list[str]) -> np.ndarray | None:
        """Mean of in-vocabulary content-word vectors; None if none are known.

        Tokens may carry sentence punctuation (surface forms); lookups use
        the stripped lowercase form.
        """
        norms = [t.lower().strip(STRIP_CHARS) for t in tokens]
        vecs = [
            v
            for t in norms
            if t and not self.is_stopword(t) and (v := self.vector_of(t)) is not None
        ]
        if not vecs:
            return None
        return np.mean(vecs, axis=0)

    def vector_for_phrase(self, text: str, tokens: list[str]) -> np.ndarray | None:
        """Phrase vector with the optional precomputed-embedding override."""
        override = self.phrase_overrides.get(phrase_hash(text))
        if override is not None:
            return override
        return self.phrase_vector(tokens)


def phrase_hash(text: str) -> str:
    canonical = " ".join(text.lower().split())
    return hashlib.md5(canonical.encode("utf-8")).hexdigest()


def heuristic_syllables(word: str) -> int:
    """Count maximal vowel-letter groups; drop a silent trailing 'e'. Floor 1."""
    w = word.lower()
    n = len(re.findall(r"[aeiouy]+", w))
    if len(w) > 3 and w.endswith("e"):
        n -= 1
    return max(n, 1)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValidationError("cosine_similarity: dimension mismatch")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine_similarity: zero-norm input")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


# -- loaders ----------------------------------------------------------------


def load_pronunciations(path: Path) -> dict[str, tuple[str, ...]]:
    entries: dict[str, tuple[str, ...]] = {}
    for line in path.read_text(encoding="utf-8", errors="replace").splitlines():
        if not line.strip() or line.startswith(";;;"):
            continue
        parts = line.split()
        word, phones = parts[0], tuple(parts[1:])
        if not phones:
            continue
        word = re.sub(r"\(\d+\)$", "", word).lower()
        # alternate pronunciations keep the first entry
        entries.setdefault(word, phones)
    return entries


def load_sentiment_clues(path: Path) -> dict[str, list[SentimentClue]]:
    clues: dict[str, list[SentimentClue]] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        kv = dict(
            pair.split("=", 1) for pair in line.split() if "=" in pair
        )
        word = kv.get("word1")
        if not word:
            raise ValidationError(f"sentiment clues line {lineno}: missing word1")
        polarity = kv.get("priorpolarity", "neutral")
        if polarity not in POLARITIES:
            raise ValidationError(
                f"sentiment clues line {lineno}: unknown polarity {polarity!r}"
            )
        strong = kv.get("type", "weaksubj") == "strongsubj"
        pos = kv.get("pos1")
        clue = SentimentClue(
            word=word.lower(),
            pos=None if pos in (None, "anypos") else pos,
            polarity=polarity,
            strength="strong" if strong else "weak",
            subjective=strong,
        )
        clues.setdefault(word.lower(), []).append(clue)
    return clues


def load_vectors(path: Path) -> tuple[dict[str, np.ndarray], int]:
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        word, values = parts[0].lower(), parts[1:]
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ValidationError(
                f"vector file line {lineno}: expected {dim} values, got {len(values)}"
            )
        vec = np.asarray([float(v) for v in values])
        if not np.linalg.norm(vec) > 0:
            raise ValidationError(f"vector file line {lineno}: zero-norm vector")
        vectors.setdefault(word, vec)
    return vectors, dim or 0


def load_phrase_overrides(path: Path, dim: int) -> dict[str, np.ndarray]:
    overrides: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        key, values = parts[0], parts[1:]
        if dim and len(values) != dim:
            raise ValidationError(
                f"phrase embedding line {lineno}: expected {dim} values"
            )
        overrides[key] = np.asarray([float(v) for v in values])
    return overrides


def load_resources(
    pron_path: Path | None = None,
    sentiment_path: Path | None = None,
    vectors_path: Path | None = None,
    phrase_path: Path | None = None,
    stopwords_path: Path | None = None,
) -> LexiconSet:
    """Load the lexicon bundle; any omitted path falls back to the packaged data."""
    base = default_resource_dir()
    pronunciations = load_pronunciations(Path(pron_path or base / "pron.dict"))
    clues = load_sentiment_clues(Path(sentiment_path or base / "sentiment.tff"))
    vectors, dim = load_vectors(Path(vectors_path or base / "vectors.txt"))
    overrides = (
        load_phrase_overrides(Path(phrase_path), dim) if phrase_path else None
    )
    stopwords = load_stopwords(stopwords_path)
    return LexiconSet(pronunciations, clues, vectors, dim, stopwords, overrides)
