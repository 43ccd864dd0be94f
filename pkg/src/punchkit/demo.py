"""Self-contained demo bundle generators.

Writes two small speech bundles — a stand-up routine about getting mistaken
for a cop, and a bit comparing Italy's and Germany's postwar reputations —
with synthesized audio, word alignments, and (for the second) dependency
parses, coreference chains, and precomputed phrase embeddings. These drive
the examples in the README and most fixture tests.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ingest import AudioTrack, encode_wav
from .lexicon import phrase_hash

SAMPLE_RATE = 16_000
WORD_DUR_S = 0.30
WORD_GAP_S = 0.08
SENTENCE_GAP_S = 0.30
BASE_AMP = 0.25
BASE_F0 = 180.0


@dataclass
class _Word:
    surface: str
    gap_before_s: float = WORD_GAP_S
    amp: float = BASE_AMP
    f0: float = BASE_F0
    dur_s: float = WORD_DUR_S


@dataclass
class _Bundle:
    meta: dict
    sentences: list[list[_Word]]
    laughter_after: list[int]  # sentence indices followed by a marker
    conllu: str | None = None
    coref: str | None = None
    phrase_vectors: dict[str, list[float]] = field(default_factory=dict)


def _plain(text: str) -> list[_Word]:
    return [_Word(w) for w in text.split()]


def _synthesize(bundle: _Bundle) -> tuple[str, str, bytes, str]:
    """Lay words out on a timeline; returns (transcript, alignment, wav, meta)."""
    transcript_lines: list[str] = []
    rows: list[tuple[str, float, float]] = []
    t = 0.5
    spans: list[tuple[float, float, float, float]] = []  # start, end, amp, f0
    for idx, words in enumerate(bundle.sentences):
        transcript_lines.append(" ".join(w.surface for w in words))
        for w in words:
            t += w.gap_before_s
            rows.append((w.surface.lower(), t, t + w.dur_s))
            spans.append((t, t + w.dur_s, w.amp, w.f0))
            t += w.dur_s
        if idx in bundle.laughter_after:
            transcript_lines.append("[LAUGHTER]")
        t += SENTENCE_GAP_S
    t += 0.4

    n = int(round(t * SAMPLE_RATE))
    samples = np.zeros(n)
    for start, end, amp, f0 in spans:
        i0, i1 = int(round(start * SAMPLE_RATE)), int(round(end * SAMPLE_RATE))
        k = np.arange(i1 - i0)
        tone = amp * np.sin(2 * np.pi * f0 * k / SAMPLE_RATE)
        ramp = min(160, len(tone) // 4)
        tone[:ramp] *= np.linspace(0, 1, ramp)
        tone[-ramp:] *= np.linspace(1, 0, ramp)
        samples[i0:i1] = tone
    wav = encode_wav(AudioTrack(samples=samples, sample_rate=SAMPLE_RATE))

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["word", "start_s", "end_s"])
    for word, start, end in rows:
        writer.writerow([word, f"{start:.3f}", f"{end:.3f}"])

    meta = dict(bundle.meta, duration_s=f"{n / SAMPLE_RATE:.3f}")
    meta_text = "".join(f"{k}: {v}\n" for k, v in meta.items())
    return "\n".join(transcript_lines) + "\n", buf.getvalue(), wav, meta_text


def write_bundle(bundle: _Bundle, out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    transcript, alignment, wav, meta = _synthesize(bundle)
    (out_dir / "transcript.txt").write_text(transcript)
    (out_dir / "alignment.csv").write_text(alignment)
    (out_dir / "audio.wav").write_bytes(wav)
    (out_dir / "meta.txt").write_text(meta)
    if bundle.conllu:
        (out_dir / "parses.conllu").write_text(bundle.conllu)
    if bundle.coref:
        (out_dir / "coref.txt").write_text(bundle.coref)
    if bundle.phrase_vectors:
        lines = [
            key + "," + ",".join(f"{v:.6f}" for v in vec)
            for key, vec in bundle.phrase_vectors.items()
        ]
        (out_dir / "phrase_vectors.csv").write_text("\n".join(lines) + "\n")
    return out_dir


# -- crime-scene routine --------------------------------------------------------


def _cop_bundle() -> _Bundle:
    punchline = _plain("And I go, I'll ask the f**king questions, okay?")
    punchline[3].gap_before_s = 0.6  # beat before the quoted comeback
    punchline[8].amp = BASE_AMP * 2  # the tone particle lands louder
    sentences = [
        _plain("Somebody is always like, are you a cop?"),
        _plain("I don't wanna say I'm a cop cause it's against the law."),
        _plain("So they go, are you a cop?"),
        _plain("So when I show up to a crime scene, they get nervous."),
        punchline,
        _plain("I am still not a cop, for the record."),
        _plain("That went over great with the officers."),
        _plain("Thank you so much."),
    ]
    return _Bundle(
        meta={
            "id": "cop-demo",
            "title": "Apparently You Can't Pretend You're a Cop",
            "speaker": "Demo Comedian",
            "category": "standup",
            "views": 2400000,
        },
        sentences=sentences,
        laughter_after=[4, 6],
    )


# -- Italy / Germany routine ------------------------------------------------------

_ITALY_CONLLU = """\
# sent 0: Stereotypes are a funny thing.
1\tStereotypes\tstereotype\tNOUN\t_\t_\t5\tnsubj\t_\t_
2\tare\tbe\tAUX\t_\t_\t5\tcop\t_\t_
3\ta\ta\tDET\t_\t_\t5\tdet\t_\t_
4\tfunny\tfunny\tADJ\t_\t_\t5\tamod\t_\t_
5\tthing.\tthing\tNOUN\t_\t_\t0\troot\t_\t_

# sent 1: Let me go after the Italian community.
1\tLet\tlet\tVERB\t_\t_\t0\troot\t_\t_
2\tme\tI\tPRON\t_\t_\t1\tobj\t_\t_
3\tgo\tgo\tVERB\t_\t_\t1\txcomp\t_\t_
4\tafter\tafter\tADP\t_\t_\t3\tcompound:prt\t_\t_
5\tthe\tthe\tDET\t_\t_\t7\tdet\t_\t_
6\tItalian\titalian\tADJ\t_\t_\t7\tamod\t_\t_
7\tcommunity.\tcommunity\tNOUN\t_\t_\t3\tobl\t_\t_

# sent 2: Their people get off easy.
1\tTheir\tthey\tPRON\t_\t_\t2\tnmod:poss\t_\t_
2\tpeople\tpeople\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tget\tget\tVERB\t_\t_\t0\troot\t_\t_
4\toff\toff\tADP\t_\t_\t3\tcompound:prt\t_\t_
5\teasy.\teasy\tADV\t_\t_\t3\tadvmod\t_\t_

# sent 3: Germany has a stigma for being evil.
1\tGermany\tgermany\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\thas\thave\tVERB\t_\t_\t0\troot\t_\t_
3\ta\ta\tDET\t_\t_\t4\tdet\t_\t_
4\tstigma\tstigma\tNOUN\t_\t_\t2\tobj\t_\t_
5\tfor\tfor\tSCONJ\t_\t_\t6\tmark\t_\t_
6\tbeing\tbe\tVERB\t_\t_\t4\tacl\t_\t_
7\tevil.\tevil\tADJ\t_\t_\t6\txcomp\t_\t_

# sent 4: But if you check history, Italy fought right alongside Germany in WWII.
1\tBut\tbut\tCCONJ\t_\t_\t7\tcc\t_\t_
2\tif\tif\tSCONJ\t_\t_\t4\tmark\t_\t_
3\tyou\tyou\tPRON\t_\t_\t4\tnsubj\t_\t_
4\tcheck\tcheck\tVERB\t_\t_\t7\tadvcl\t_\t_
5\thistory,\thistory\tNOUN\t_\t_\t4\tobj\t_\t_
6\tItaly\titaly\tPROPN\t_\t_\t7\tnsubj\t_\t_
7\tfought\tfight\tVERB\t_\t_\t0\troot\t_\t_
8\tright\tright\tADV\t_\t_\t9\tadvmod\t_\t_
9\talongside\talongside\tADP\t_\t_\t10\tcase\t_\t_
10\tGermany\tgermany\tPROPN\t_\t_\t7\tobl\t_\t_
11\tin\tin\tADP\t_\t_\t12\tcase\t_\t_
12\tWWII.\twwii\tPROPN\t_\t_\t7\tobl\t_\t_

# sent 5: But we have no stigma for evil, and do you guys know why?
1\tBut\tbut\tCCONJ\t_\t_\t3\tcc\t_\t_
2\twe\twe\tPRON\t_\t_\t3\tnsubj\t_\t_
3\thave\thave\tVERB\t_\t_\t0\troot\t_\t_
4\tno\tno\tDET\t_\t_\t5\tdet\t_\t_
5\tstigma\tstigma\tNOUN\t_\t_\t3\tobj\t_\t_
6\tfor\tfor\tADP\t_\t_\t7\tcase\t_\t_
7\tevil,\tevil\tNOUN\t_\t_\t5\tnmod\t_\t_
8\tand\tand\tCCONJ\t_\t_\t12\tcc\t_\t_
9\tdo\tdo\tAUX\t_\t_\t12\taux\t_\t_
10\tyou\tyou\tPRON\t_\t_\t11\tcompound\t_\t_
11\tguys\tguy\tNOUN\t_\t_\t12\tnsubj\t_\t_
12\tknow\tknow\tVERB\t_\t_\t3\tconj\t_\t_
13\twhy?\twhy\tADV\t_\t_\t12\tadvmod\t_\t_
"""


def _italy_phrase_vectors(dim: int = 12) -> dict[str, list[float]]:
    """Precomputed embeddings for the repeated reputation phrases.

    Word-vector pooling would either collapse "for being evil" / "for evil"
    onto the bare noun's vector or drag "a stigma for being evil" to the
    midpoint of two unrelated concept axes; these place each phrase next to
    its head concept the way a real phrase encoder would.
    """

    def axis_pair(primary: int, secondary: int, a: float, b: float) -> list[float]:
        v = [0.0] * dim
        v[primary], v[secondary] = a, b
        return v

    return {
        phrase_hash("for being evil."): axis_pair(8, 9, 0.95, 0.312250),
        phrase_hash("for evil,"): axis_pair(8, 9, 0.90, 0.435890),
        phrase_hash("a stigma for being evil."): axis_pair(7, 10, 0.95, 0.312250),
        phrase_hash("no stigma for evil,"): axis_pair(7, 10, 0.90, 0.435890),
    }


def _italy_bundle() -> _Bundle:
    sentences = [
        _plain("Stereotypes are a funny thing."),
        _plain("Let me go after the Italian community."),
        _plain("Their people get off easy."),
        _plain("Germany has a stigma for being evil."),
        _plain("But if you check history, Italy fought right alongside Germany in WWII."),
        _plain("But we have no stigma for evil, and do you guys know why?"),
    ]
    return _Bundle(
        meta={
            "id": "italy-demo",
            "title": "Stigma and Stereotypes",
            "speaker": "Demo Comedian",
            "category": "standup",
            "views": 180000,
        },
        sentences=sentences,
        laughter_after=[5],
        conllu=_ITALY_CONLLU,
        coref="the Italian community\t1:4-6;2:0-0\n",
        phrase_vectors=_italy_phrase_vectors(),
    )


def write_demo_bundles(root: Path) -> dict[str, Path]:
    """Write both demo bundles under root; returns {bundle id: directory}."""
    root = Path(root)
    return {
        "cop-demo": write_bundle(_cop_bundle(), root / "cop-demo"),
        "italy-demo": write_bundle(_italy_bundle(), root / "italy-demo"),
    }
