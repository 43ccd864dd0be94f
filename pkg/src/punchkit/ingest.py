"""Input bundle parsing and humor snippet segmentation.

A speech bundle consists of a transcript (one sentence per line, with literal
``[LAUGHTER]`` lines marking audience laughter), a word-level alignment CSV
(``word,start_s,end_s``), a 16-bit PCM WAV file, and a flat key-value
metadata document.
"""
from __future__ import annotations

import csv
import io
import wave
from dataclasses import dataclass, field

import numpy as np

from . import lexicon
from .errors import ValidationError
from .lexicon import LexiconSet, heuristic_syllables

LAUGHTER_MARK = "[LAUGHTER]"
MIN_ALIGNMENT_COVERAGE = 0.95
MIN_SAMPLE_RATE = 8000

_STRIP_CHARS = lexicon.STRIP_CHARS

META_KEYS = ("id", "title", "speaker", "category", "views", "duration_s")


def normalize(surface: str) -> str:
    """Lowercase and strip outer punctuation; inner characters are kept."""
    return surface.lower().strip(_STRIP_CHARS)


@dataclass(frozen=True)
class SpeechMeta:
    id: str
    title: str
    speaker: str
    category: str
    views: int
    duration_s: float


@dataclass
class WordToken:
    surface: str
    norm: str
    sent_index: int
    start_s: float
    end_s: float
    phones: tuple[str, ...] = ()
    syllables: int = 1
    pos: str | None = None
    lemma: str | None = None

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass
class Sentence:
    index: int  # position in transcript order
    tokens: list[WordToken]
    is_punchline: bool = False
    snippet_index: int | None = None
    sentence_index: int | None = None  # position within its snippet

    @property
    def span_s(self) -> tuple[float, float]:
        return (
            min(t.start_s for t in self.tokens),
            max(t.end_s for t in self.tokens),
        )

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass
class Snippet:
    index: int
    sentences: list[Sentence]

    @property
    def span_s(self) -> tuple[float, float]:
        return (self.sentences[0].span_s[0], self.sentences[-1].span_s[1])

    @property
    def punchline(self) -> Sentence:
        return self.sentences[-1]


@dataclass(frozen=True)
class LaughterEvent:
    time_s: float
    after_sentence: int


@dataclass
class AudioTrack:
    samples: np.ndarray  # float amplitudes in [-1, 1]
    sample_rate: int

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


# -- transcript ---------------------------------------------------------------


def parse_transcript(text: str) -> tuple[list[list[str]], list[int]]:
    """Split a transcript into per-sentence token lists and laughter positions.

    Returns (sentences, laughter_after) where laughter_after holds the index
    of the sentence each marker follows (-1 when a marker precedes any
    sentence; segmentation rejects that case).
    """
    sentences: list[list[str]] = []
    laughter_after: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        for tok in tokens:
            if tok.startswith("[") and "]" not in tok:
                raise ValidationError(
                    f"transcript line {lineno}: unclosed marker {tok!r}"
                )
        words = [t for t in tokens if t.upper() != LAUGHTER_MARK]
        had_marker = len(words) != len(tokens)
        if words:
            sentences.append(words)
        if had_marker:
            # inline markers normalize to a break after their sentence
            laughter_after.append(len(sentences) - 1)
    return sentences, laughter_after


# -- alignment ----------------------------------------------------------------


def parse_alignment(text: str) -> list[tuple[str, float, float]]:
    rows: list[tuple[str, float, float]] = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip():
            continue
        if row[0].strip().lower() == "word":  # optional header
            continue
        if len(row) < 3:
            raise ValidationError(f"alignment line {lineno}: need word,start_s,end_s")
        try:
            start, end = float(row[1]), float(row[2])
        except ValueError:
            raise ValidationError(f"alignment line {lineno}: non-numeric time")
        if end < start:
            raise ValidationError(f"alignment line {lineno}: end before start")
        rows.append((row[0].strip(), start, end))
    return rows


def attach_timings(
    sentence_words: list[list[str]],
    rows: list[tuple[str, float, float]],
    duration_s: float,
    lexicons: LexiconSet | None = None,
) -> list[Sentence]:
    """Match alignment rows to transcript tokens in order and interpolate gaps.

    Tokens missing from the alignment get timings split proportionally by
    character length between their aligned neighbors. Coverage below 95%
    is rejected.
    """
    flat: list[tuple[int, int, str]] = [
        (si, wi, w)
        for si, words in enumerate(sentence_words)
        for wi, w in enumerate(words)
    ]
    n = len(flat)
    spans: list[tuple[float, float] | None] = [None] * n
    p = 0
    for i, (_, _, surface) in enumerate(flat):
        if p < len(rows) and rows[p][0].lower() in (
            surface.lower(),
            normalize(surface),
        ):
            spans[i] = (rows[p][1], rows[p][2])
            p += 1
    aligned = sum(1 for s in spans if s is not None)
    if n and aligned / n < MIN_ALIGNMENT_COVERAGE:
        raise ValidationError(
            f"alignment covers {aligned}/{n} tokens "
            f"({100 * aligned / n:.1f}% < {100 * MIN_ALIGNMENT_COVERAGE:.0f}%)"
        )

    # interpolate runs of unaligned tokens between aligned anchors
    i = 0
    while i < n:
        if spans[i] is not None:
            i += 1
            continue
        j = i
        while j < n and spans[j] is None:
            j += 1
        left = spans[i - 1][1] if i > 0 else 0.0
        right = spans[j][0] if j < n else max(duration_s, left)
        right = max(right, left)
        lengths = [max(len(normalize(flat[k][2])), 1) for k in range(i, j)]
        total = sum(lengths)
        t = left
        for k, length in zip(range(i, j), lengths):
            step = (right - left) * length / total
            spans[k] = (t, t + step)
            t += step
        i = j

    sentences: list[Sentence] = []
    for si, words in enumerate(sentence_words):
        tokens: list[WordToken] = []
        for wi, surface in enumerate(words):
            idx = len(tokens) + sum(len(sw) for sw in sentence_words[:si])
            start, end = spans[idx]
            norm = normalize(surface)
            phones = lexicons.phones_of(norm) if lexicons else None
            syllables = (
                lexicons.syllable_count(norm)
                if lexicons
                else heuristic_syllables(norm)
            )
            tokens.append(
                WordToken(
                    surface=surface,
                    norm=norm,
                    sent_index=wi,
                    start_s=start,
                    end_s=end,
                    phones=phones or (),
                    syllables=syllables,
                )
            )
        sentences.append(Sentence(index=si, tokens=tokens))
    return sentences


# -- audio --------------------------------------------------------------------


def parse_wav(data: bytes) -> AudioTrack:
    try:
        with wave.open(io.BytesIO(data)) as wf:
            if wf.getcomptype() != "NONE":
                raise ValidationError(f"unsupported WAV compression {wf.getcomptype()!r}")
            if wf.getsampwidth() != 2:
                raise ValidationError(
                    f"unsupported WAV encoding: {8 * wf.getsampwidth()}-bit (need 16-bit PCM)"
                )
            rate = wf.getframerate()
            channels = wf.getnchannels()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        raise ValidationError(f"unreadable WAV: {exc}")
    if rate < MIN_SAMPLE_RATE:
        raise ValidationError(f"sample rate {rate} Hz below {MIN_SAMPLE_RATE} Hz")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return AudioTrack(samples=samples, sample_rate=rate)


def encode_wav(track: AudioTrack) -> bytes:
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(track.sample_rate)
        pcm = np.clip(np.round(track.samples * 32767.0), -32768, 32767).astype("<i2")
        wf.writeframes(pcm.tobytes())
    return buf.getvalue()


def clip_audio(track: AudioTrack, span_s: tuple[float, float]) -> AudioTrack:
    start, end = span_s
    if not (0.0 <= start < end <= track.duration_s + 1e-9):
        raise ValidationError(f"clip span {span_s} outside track of {track.duration_s:.3f} s")
    lo = int(round(start * track.sample_rate))
    hi = int(round(end * track.sample_rate))
    return AudioTrack(samples=track.samples[lo:hi], sample_rate=track.sample_rate)


# -- metadata -----------------------------------------------------------------


def parse_meta(text: str) -> SpeechMeta:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for sep in (":", "="):
            if sep in line:
                key, _, value = line.partition(sep)
                values[key.strip().lower()] = value.strip()
                break
        else:
            raise ValidationError(f"metadata line {lineno}: expected key: value")
    missing = [k for k in META_KEYS if k not in values]
    if missing:
        raise ValidationError(f"metadata missing keys: {', '.join(missing)}")
    try:
        views = int(values["views"])
        duration = float(values["duration_s"])
    except ValueError:
        raise ValidationError("metadata: views must be an integer, duration_s a number")
    if not values["id"]:
        raise ValidationError("metadata: id must be non-empty")
    if views < 0 or duration <= 0:
        raise ValidationError("metadata: views must be >= 0 and duration_s > 0")
    return SpeechMeta(
        id=values["id"],
        title=values["title"],
        speaker=values["speaker"],
        category=values["category"],
        views=views,
        duration_s=duration,
    )


# -- bundle -------------------------------------------------------------------


def parse_bundle(
    transcript_bytes: bytes,
    alignment_bytes: bytes,
    audio_bytes: bytes,
    meta_bytes: bytes,
    lexicons: LexiconSet | None = None,
) -> tuple[SpeechMeta, list[Sentence], list[LaughterEvent], AudioTrack]:
    meta = parse_meta(meta_bytes.decode("utf-8"))
    track = parse_wav(audio_bytes)
    if abs(track.duration_s - meta.duration_s) > 0.5:
        raise ValidationError(
            f"audio duration {track.duration_s:.2f} s disagrees with "
            f"metadata duration_s {meta.duration_s:.2f} s by more than 0.5 s"
        )
    words, laughter_after = parse_transcript(transcript_bytes.decode("utf-8"))
    rows = parse_alignment(alignment_bytes.decode("utf-8"))
    sentences = attach_timings(words, rows, meta.duration_s, lexicons)
    events = [
        LaughterEvent(
            time_s=sentences[after].span_s[1] if after >= 0 else 0.0,
            after_sentence=after,
        )
        for after in laughter_after
    ]
    return meta, sentences, events, track


def segment_snippets(
    sentences: list[Sentence], events: list[LaughterEvent]
) -> list[Snippet]:
    """Partition sentences into snippets, one per laughter event.

    Each snippet ends at the sentence immediately before its marker; all
    sentences since the previous punchline are its context. Sentences after
    the final marker are left untouched (use :func:`tail_sentences`).
    """
    snippets: list[Snippet] = []
    prev = -1
    for k, event in enumerate(events):
        if event.after_sentence < 0:
            raise ValidationError("laughter marker before any sentence")
        if event.after_sentence <= prev:
            raise ValidationError(
                f"laughter marker {k} does not advance past sentence {prev}"
            )
        if event.after_sentence >= len(sentences):
            raise ValidationError(f"laughter marker {k} references missing sentence")
        members = sentences[prev + 1 : event.after_sentence + 1]
        for j, sent in enumerate(members):
            sent.snippet_index = k
            sent.sentence_index = j
            sent.is_punchline = False
        members[-1].is_punchline = True
        snippets.append(Snippet(index=k, sentences=members))
        prev = event.after_sentence
    return snippets


def tail_sentences(
    sentences: list[Sentence], events: list[LaughterEvent]
) -> list[Sentence]:
    """Sentences after the final laughter marker: retained but not analyzed."""
    if not events:
        return list(sentences)
    return sentences[events[-1].after_sentence + 1 :]
