import numpy as np
import pytest

from punchkit.demo import write_demo_bundles
from punchkit.ingest import Sentence, WordToken, normalize
from punchkit.lexicon import load_resources
from punchkit.pipeline import BundlePaths, process_bundle


@pytest.fixture(scope="session")
def lexicons():
    return load_resources()


@pytest.fixture(scope="session")
def demo_dirs(tmp_path_factory):
    return write_demo_bundles(tmp_path_factory.mktemp("bundles"))


@pytest.fixture(scope="session")
def cop_result(demo_dirs, lexicons):
    return process_bundle(BundlePaths.from_dir(demo_dirs["cop-demo"]), lexicons)


@pytest.fixture(scope="session")
def italy_result(demo_dirs, lexicons):
    return process_bundle(BundlePaths.from_dir(demo_dirs["italy-demo"]), lexicons)


@pytest.fixture(scope="session")
def cop_doc(cop_result):
    return cop_result[0]


@pytest.fixture(scope="session")
def italy_doc(italy_result):
    return italy_result[0]


def make_sentence(words, start=0.0, dur=0.3, gap=0.1, index=0, lexicons=None):
    """Build a timed Sentence from surface words for detector tests."""
    tokens = []
    t = start
    for i, w in enumerate(words):
        norm = normalize(w)
        phones = lexicons.phones_of(norm) if lexicons else None
        syllables = lexicons.syllable_count(norm) if lexicons else 1
        tokens.append(
            WordToken(
                surface=w,
                norm=norm,
                sent_index=i,
                start_s=t,
                end_s=t + dur,
                phones=phones or (),
                syllables=syllables,
            )
        )
        t += dur + gap
    return Sentence(index=index, tokens=tokens)


def unit(dim, axis, value=1.0):
    v = np.zeros(dim)
    v[axis] = value
    return v
