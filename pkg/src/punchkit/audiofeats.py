"""Frame-level acoustics and word-level vocal delivery features.

RMS energy and a normalized-autocorrelation pitch contour are computed once
per speech on a 40 ms window / 10 ms hop grid, then aggregated per word to
drive the speed, pause, volume, and pitch-stress detectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ingest import AudioTrack, Sentence, WordToken
from .textfeats import FeatureAnnotation, ThresholdConfig

F0_MIN_HZ = 75.0
F0_MAX_HZ = 500.0
CLARITY_THRESHOLD = 0.45
SILENCE_RMS_FLOOR = 1e-4
DB_EPS = 1e-10


@dataclass
class FrameSeries:
    hop_s: float
    window_s: float
    rms: np.ndarray
    f0_hz: np.ndarray  # NaN where unvoiced

    def __len__(self) -> int:
        return len(self.rms)

    def centers(self) -> np.ndarray:
        return np.arange(len(self.rms)) * self.hop_s + self.window_s / 2.0


@dataclass
class WordAcoustics:
    spm: float
    mean_rms: float
    mean_db: float
    mean_f0: float | None
    f0_range: float | None


def analyze_frames(
    track: AudioTrack, hop_s: float = 0.010, window_s: float = 0.040
) -> FrameSeries:
    rate = track.sample_rate
    hop = int(round(hop_s * rate))
    win = int(round(window_s * rate))
    x = track.samples
    if len(x) < win:
        raise ValidationError("track shorter than one analysis window")
    n_frames = math.ceil(len(x) / hop)
    lag_min = max(2, int(rate / F0_MAX_HZ))
    lag_max = min(win - 1, int(rate / F0_MIN_HZ))

    rms = np.empty(n_frames)
    f0 = np.full(n_frames, np.nan)
    for i in range(n_frames):
        frame = x[i * hop : i * hop + win]
        if len(frame) < win:
            frame = np.pad(frame, (0, win - len(frame)))
        rms[i] = float(np.sqrt(np.mean(frame * frame)))
        if rms[i] <= SILENCE_RMS_FLOOR:
            continue
        f0[i] = _frame_f0(frame, rate, lag_min, lag_max)
    return FrameSeries(hop_s=hop_s, window_s=window_s, rms=rms, f0_hz=f0)


def _frame_f0(frame: np.ndarray, rate: int, lag_min: int, lag_max: int) -> float:
    """Normalized autocorrelation peak in the search band; NaN when unclear."""
    n = len(frame)
    energy = np.cumsum(frame * frame)

    def seg_energy(a: int, b: int) -> float:  # sum of squares over [a, b)
        return energy[b - 1] - (energy[a - 1] if a > 0 else 0.0)

    lags = np.arange(lag_min, lag_max + 1)
    corr = np.empty(len(lags))
    for k, lag in enumerate(lags):
        m = n - lag
        num = float(np.dot(frame[:m], frame[lag:]))
        den = math.sqrt(seg_energy(0, m) * seg_energy(lag, n))
        corr[k] = num / den if den > 0 else 0.0
    k = int(np.argmax(corr))
    if corr[k] < CLARITY_THRESHOLD:
        return float("nan")
    lag = float(lags[k])
    if 0 < k < len(lags) - 1:  # parabolic refinement around the peak
        a, b, c = corr[k - 1], corr[k], corr[k + 1]
        denom = a - 2 * b + c
        if denom != 0:
            lag += 0.5 * (a - c) / denom
    f0 = rate / lag
    return float(min(max(f0, F0_MIN_HZ), F0_MAX_HZ))


def word_acoustics(word: WordToken, frames: FrameSeries) -> WordAcoustics:
    centers = frames.centers()
    mask = (centers >= word.start_s) & (centers <= word.end_s)
    if not mask.any():
        # degenerate span: fall back to the single nearest frame
        nearest = int(np.argmin(np.abs(centers - (word.start_s + word.end_s) / 2)))
        mask = np.zeros(len(centers), dtype=bool)
        mask[nearest] = True
    mean_rms = float(frames.rms[mask].mean())
    voiced = frames.f0_hz[mask]
    voiced = voiced[~np.isnan(voiced)]
    spm = word.syllables / max(word.duration_s, 0.001) * 60.0
    return WordAcoustics(
        spm=spm,
        mean_rms=mean_rms,
        mean_db=20.0 * math.log10(mean_rms + DB_EPS),
        mean_f0=float(voiced.mean()) if len(voiced) else None,
        f0_range=float(voiced.max() - voiced.min()) if len(voiced) else None,
    )


def sentence_acoustics(
    sentence: Sentence, frames: FrameSeries
) -> list[WordAcoustics]:
    return [word_acoustics(tok, frames) for tok in sentence.tokens]


# -- detectors ------------------------------------------------------------


def detect_speed_variation(
    sentence: Sentence, acoustics: list[WordAcoustics], config: ThresholdConfig
) -> list[FeatureAnnotation]:
    if len(sentence.tokens) < 2:
        return []
    spms = np.array([a.spm for a in acoustics])
    mu = float(spms.mean())
    sigma = float(spms.std())
    out = []
    for i, spm in enumerate(spms):
        faster = spm >= (1.0 + config.speed_N) * mu or (
            sigma > 0 and spm >= mu + config.speed_M * sigma
        )
        slower = spm <= mu / (1.0 + config.speed_N) or (
            sigma > 0 and spm <= mu - config.speed_M * sigma
        )
        if faster:
            out.append(FeatureAnnotation("faster", (i,), spm / mu))
        elif slower:
            out.append(FeatureAnnotation("slower", (i,), spm / mu))
    return out


def detect_pauses(
    tokens: list[tuple[int, int, WordToken]], config: ThresholdConfig
) -> list[tuple[int, FeatureAnnotation]]:
    """Gaps above the threshold between consecutive tokens of a snippet.

    `tokens` carries (sentence position within snippet, word index, token)
    in time order; the annotation targets the word after the gap and is
    returned tagged with its sentence position.
    """
    out = []
    for (_, _, prev), (sent_pos, word_idx, cur) in zip(tokens, tokens[1:]):
        gap = cur.start_s - prev.end_s
        if gap > config.pause_min_s:
            out.append(
                (sent_pos, FeatureAnnotation("pause", (word_idx,), gap))
            )
    return out


def detect_volume_variation(
    sentence: Sentence, acoustics: list[WordAcoustics], config: ThresholdConfig
) -> list[FeatureAnnotation]:
    if len(sentence.tokens) < 2:
        return []
    out = []
    for i in range(1, len(acoustics)):
        delta = acoustics[i].mean_db - acoustics[i - 1].mean_db
        if delta >= config.volume_delta_db:
            out.append(FeatureAnnotation("louder", (i,), delta))
        elif delta <= -config.volume_delta_db:
            out.append(FeatureAnnotation("softer", (i,), delta))
    return out


def detect_pitch_stress(
    sentence: Sentence, acoustics: list[WordAcoustics], config: ThresholdConfig
) -> list[FeatureAnnotation]:
    """Words with outlying mean pitch or pitch range among voiced words.

    The baseline for each word excludes the word itself; comparing a word
    against statistics that include it washes out single-word stress in
    short sentences.
    """
    voiced = [(i, a) for i, a in enumerate(acoustics) if a.mean_f0 is not None]
    if len(voiced) < 2:
        return []
    out = []
    for i, a in voiced:
        others_f0 = np.array([b.mean_f0 for j, b in voiced if j != i])
        others_rng = np.array([b.f0_range for j, b in voiced if j != i])
        stressed = False
        mu_f, sd_f = float(others_f0.mean()), float(others_f0.std())
        if sd_f > 0 and a.mean_f0 >= mu_f + config.pitch_M * sd_f:
            stressed = True
        mu_r, sd_r = float(others_rng.mean()), float(others_rng.std())
        if not stressed and sd_r > 0 and a.f0_range >= mu_r + config.pitch_M * sd_r:
            stressed = True
        if stressed:
            out.append(FeatureAnnotation("stress", (i,), float(a.mean_f0)))
    return out
