"""Concept grouping and the context linking graph.

Pipeline per snippet: induce subphrases from dependency trees (or a trigram
fallback when no parse is supplied), substitute coreferent pronouns, embed
the phrases, density-cluster them by cosine distance, reduce redundancy to
one member per sentence, and emit sentence-pair links.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .ingest import Sentence, Snippet
from .lexicon import LexiconSet
from .textfeats import ThresholdConfig, is_content_token

MAX_SUBPHRASE_LEN = 6

NOUN_POS = {"NOUN", "PROPN"}
VERB_POS = {"VERB"}
_CORE_RELS = {"det", "amod", "compound", "nummod"}

PRONOUNS = {
    "he", "she", "it", "they", "him", "her", "them",
    "his", "hers", "its", "their", "theirs",
}
POSSESSIVE_PRONOUNS = {"his", "her", "its", "their", "my", "our", "your"}
_DETERMINERS = {"the", "a", "an", "this", "that", "these", "those"}


@dataclass
class DependencyTree:
    heads: tuple[int, ...]  # -1 for root
    rels: tuple[str, ...]
    upos: tuple[str, ...]
    lemmas: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.heads)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.heads]
        for i, h in enumerate(self.heads):
            if h >= 0:
                kids[h].append(i)
        return kids

    def subtree_span(self, i: int) -> tuple[int, int]:
        kids = self.children()
        lo = hi = i
        stack = [i]
        while stack:
            node = stack.pop()
            lo = min(lo, node)
            hi = max(hi, node)
            stack.extend(kids[node])
        return lo, hi


@dataclass
class PhraseSpan:
    sentence: int  # sentence position within the snippet
    first: int
    last: int  # inclusive
    text: str
    substituted_text: str
    vector: np.ndarray | None = None


@dataclass(frozen=True)
class CorefChain:
    representative: str
    mentions: tuple[tuple[int, int, int], ...]  # (sentence, first, last)


@dataclass
class ConceptCluster:
    cluster_id: int
    color: int
    members: list[PhraseSpan]

    def sentence_set(self) -> set[int]:
        return {m.sentence for m in self.members}


@dataclass
class ContextGraph:
    snippet_index: int
    node_lengths: list[int]  # token count per sentence
    punchline: int
    clusters: list[ConceptCluster]
    links: list[tuple[int, int, int]]  # (sentence i, sentence j, cluster id), i < j


# -- CoNLL-U ------------------------------------------------------------------


def parse_conllu(text: str, expected_sentences: int | None = None) -> list[DependencyTree]:
    trees: list[DependencyTree] = []
    block: list[list[str]] = []

    def flush():
        if not block:
            return
        heads, rels, upos, lemmas = [], [], [], []
        for cols in block:
            head = int(cols[6]) - 1
            heads.append(head)
            rels.append(cols[7])
            upos.append(cols[3])
            lemmas.append(cols[2])
        n = len(heads)
        roots = [i for i, h in enumerate(heads) if h < 0]
        if len(roots) != 1:
            raise ValidationError(
                f"conllu sentence {len(trees)}: expected one root, found {len(roots)}"
            )
        for i in range(n):
            if heads[i] >= n:
                raise ValidationError(f"conllu sentence {len(trees)}: head out of range")
            seen = set()
            j = i
            while heads[j] >= 0:
                if j in seen:
                    raise ValidationError(f"conllu sentence {len(trees)}: cyclic heads")
                seen.add(j)
                j = heads[j]
        trees.append(
            DependencyTree(tuple(heads), tuple(rels), tuple(upos), tuple(lemmas))
        )
        block.clear()

    for raw in text.splitlines():
        line = raw.strip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ValidationError("conllu: expected 10 tab-separated columns")
        if "-" in cols[0] or "." in cols[0]:  # multiword ranges / empty nodes
            continue
        block.append(cols)
    flush()
    if expected_sentences is not None and len(trees) != expected_sentences:
        raise ValidationError(
            f"conllu has {len(trees)} sentences, transcript has {expected_sentences}"
        )
    return trees


def parse_coref_chains(text: str) -> list[CorefChain]:
    """One chain per line: ``rep_text<TAB>sent:first-last;sent:first-last;...``."""
    chains: list[CorefChain] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if "\t" not in line:
            raise ValidationError(f"coref line {lineno}: missing tab separator")
        rep, spec = line.split("\t", 1)
        mentions = []
        for part in spec.split(";"):
            part = part.strip()
            if not part:
                continue
            try:
                sent, rng = part.split(":")
                first, last = rng.split("-")
                mentions.append((int(sent), int(first), int(last)))
            except ValueError:
                raise ValidationError(f"coref line {lineno}: bad mention {part!r}")
        if len(mentions) < 2:
            raise ValidationError(f"coref line {lineno}: chains need >= 2 mentions")
        chains.append(CorefChain(representative=rep, mentions=tuple(mentions)))
    return chains


# -- subphrase induction --------------------------------------------------------


def induce_subphrases(
    tree: DependencyTree, sentence: Sentence, max_len: int = MAX_SUBPHRASE_LEN
) -> list[tuple[int, int]]:
    """Token ranges (inclusive) rooted at each noun or verb token."""
    if len(tree) != len(sentence.tokens):
        raise ValidationError(
            f"tree has {len(tree)} tokens, sentence has {len(sentence.tokens)}"
        )
    kids = tree.children()
    ranges: set[tuple[int, int]] = set()
    for i, pos in enumerate(tree.upos):
        if pos not in NOUN_POS and pos not in VERB_POS:
            continue
        lo, hi = tree.subtree_span(i)
        if hi - lo + 1 > max_len:
            lo, hi = _nominal_core(tree, kids, i)
        ranges.add((lo, hi))
        ranges.add((i, i))
    return sorted(ranges)


def _nominal_core(
    tree: DependencyTree, kids: list[list[int]], head: int
) -> tuple[int, int]:
    """Head plus its contiguous determiner/adjective/compound dependents."""
    wanted = {head}
    for c in kids[head]:
        if tree.rels[c] in _CORE_RELS or tree.upos[c] in {"DET", "ADJ"}:
            wanted.add(c)
    lo = hi = head
    while lo - 1 in wanted:
        lo -= 1
    while hi + 1 in wanted:
        hi += 1
    return lo, hi


def fallback_subphrases(
    sentence: Sentence, lexicons: LexiconSet
) -> list[tuple[int, int]]:
    """Without a parse: content tokens plus trigram windows around them."""
    n = len(sentence.tokens)
    content = [i for i, t in enumerate(sentence.tokens) if is_content_token(t, lexicons)]
    ranges: set[tuple[int, int]] = {(i, i) for i in content}
    for i in content:
        lo = max(0, i - 1)
        hi = min(n - 1, i + 1)
        if hi > lo:
            ranges.add((lo, hi))
    return sorted(ranges)


# -- coreference ----------------------------------------------------------------


def _rep_nominal(representative: str, possessive: bool) -> str:
    toks = representative.split()
    while toks and toks[0].lower() in _DETERMINERS:
        toks = toks[1:]
    if possessive and len(toks) > 1:
        toks = toks[:-1]  # keep the modifier form: "the Italian community" -> "Italian"
    return " ".join(toks) if toks else representative


def apply_coreference(
    spans: list[PhraseSpan],
    chains: list[CorefChain] | None,
    sentences: list[Sentence],
) -> list[PhraseSpan]:
    """Fill substituted_text, replacing chain-covered pronouns with the
    representative's nominal form. Without chains, a rule-based fallback
    links third-person pronouns to the nearest preceding noun head within
    two sentences. Chain mention coordinates use transcript-global sentence
    indices (``Sentence.index``)."""
    mention_map: dict[tuple[int, int], str] = {}
    if chains:
        for chain in chains:
            for sent, first, last in chain.mentions:
                for idx in range(first, last + 1):
                    mention_map[(sent, idx)] = chain.representative

    for span in spans:
        sentence = sentences[span.sentence]
        tokens = sentence.tokens[span.first : span.last + 1]
        out: list[str] = []
        for offset, tok in enumerate(tokens):
            idx = span.first + offset
            norm = tok.norm
            if norm in PRONOUNS or norm in POSSESSIVE_PRONOUNS:
                rep = mention_map.get((sentence.index, idx))
                if rep is None and not chains:
                    rep = _fallback_antecedent(sentences, span.sentence, idx)
                if rep is not None:
                    out.append(_rep_nominal(rep, norm in POSSESSIVE_PRONOUNS))
                    continue
            out.append(tok.surface)
        span.substituted_text = " ".join(out)
    return spans


def _fallback_antecedent(
    sentences: list[Sentence], sent_pos: int, token_idx: int
) -> str | None:
    for s in range(sent_pos, max(-1, sent_pos - 3), -1):
        tokens = sentences[s].tokens
        upto = token_idx if s == sent_pos else len(tokens)
        for i in range(upto - 1, -1, -1):
            pos = (tokens[i].pos or "").upper()
            if pos in NOUN_POS or pos.startswith("NN"):
                return tokens[i].surface
    return None


# -- clustering -----------------------------------------------------------------


def cluster_concepts(
    vectors: list[np.ndarray], eps: float, min_pts: int
) -> list[int]:
    """Density-based clustering with distance 1 - cosine similarity.

    Returns a label per input vector, -1 for noise. Deterministic: core
    points are expanded in index order with a FIFO frontier.
    """
    n = len(vectors)
    if n == 0:
        return []
    X = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(X, axis=1)
    X = X / norms[:, None]
    dist = 1.0 - X @ X.T
    neighbors = [np.flatnonzero(dist[i] <= eps) for i in range(n)]
    core = [len(nb) >= min_pts for nb in neighbors]
    labels = [-1] * n
    cluster_id = 0
    for seed in range(n):
        if labels[seed] != -1 or not core[seed]:
            continue
        labels[seed] = cluster_id
        queue = [seed]
        qi = 0
        while qi < len(queue):
            node = queue[qi]
            qi += 1
            if not core[node]:
                continue
            for nb in neighbors[node]:
                if labels[nb] == -1:
                    labels[nb] = cluster_id
                    queue.append(int(nb))
        cluster_id += 1
    return labels


def reduce_redundancy(
    spans: list[PhraseSpan], labels: list[int]
) -> list[ConceptCluster]:
    """Keep one member per sentence per cluster (highest centroid similarity,
    ties to the shortest then earliest span); drop single-sentence clusters."""
    by_label: dict[int, list[PhraseSpan]] = {}
    for span, label in zip(spans, labels):
        if label >= 0:
            by_label.setdefault(label, []).append(span)

    clusters: list[ConceptCluster] = []
    for label in sorted(by_label):
        members = by_label[label]
        centroid = np.mean([m.vector for m in members], axis=0)
        cnorm = np.linalg.norm(centroid)
        if cnorm == 0:
            continue

        def centroid_sim(span: PhraseSpan) -> float:
            v = span.vector
            return float(np.dot(v, centroid) / (np.linalg.norm(v) * cnorm))

        survivors: list[PhraseSpan] = []
        by_sentence: dict[int, list[PhraseSpan]] = {}
        for m in members:
            by_sentence.setdefault(m.sentence, []).append(m)
        for sent in sorted(by_sentence):
            best = min(
                by_sentence[sent],
                key=lambda m: (-centroid_sim(m), m.last - m.first, m.first),
            )
            survivors.append(best)
        if len({m.sentence for m in survivors}) < 2:
            continue
        survivors.sort(key=lambda m: (m.sentence, m.first))
        clusters.append(ConceptCluster(cluster_id=label, color=0, members=survivors))

    # stable color indices by first-occurrence order
    clusters.sort(key=lambda c: (c.members[0].sentence, c.members[0].first))
    for color, cluster in enumerate(clusters):
        cluster.color = color
    return clusters


# -- graph assembly ---------------------------------------------------------------


def build_context_graph(
    snippet: Snippet,
    trees: list[DependencyTree] | None,
    chains: list[CorefChain] | None,
    lexicons: LexiconSet,
    config: ThresholdConfig,
    max_subphrase_len: int = MAX_SUBPHRASE_LEN,
) -> ContextGraph:
    sentences = snippet.sentences
    if trees is not None and len(trees) != len(sentences):
        raise ValidationError(
            f"snippet {snippet.index}: {len(trees)} trees for {len(sentences)} sentences"
        )

    spans: list[PhraseSpan] = []
    for pos, sentence in enumerate(sentences):
        if trees is not None:
            ranges = induce_subphrases(trees[pos], sentence, max_subphrase_len)
        else:
            ranges = fallback_subphrases(sentence, lexicons)
        for lo, hi in ranges:
            tokens = sentence.tokens[lo : hi + 1]
            if all(lexicons.is_stopword(t.norm) or not t.norm for t in tokens):
                continue  # function-word matches are not concepts
            text = " ".join(t.surface for t in tokens)
            spans.append(
                PhraseSpan(
                    sentence=pos, first=lo, last=hi, text=text, substituted_text=text
                )
            )

    apply_coreference(spans, chains, sentences)

    embedded: list[PhraseSpan] = []
    for span in spans:
        vec = lexicons.vector_for_phrase(
            span.substituted_text, span.substituted_text.split()
        )
        if vec is not None:
            span.vector = vec
            embedded.append(span)

    labels = cluster_concepts(
        [s.vector for s in embedded], config.cluster_eps, config.cluster_min_pts
    )
    clusters = reduce_redundancy(embedded, labels)
    for new_id, cluster in enumerate(clusters):
        cluster.cluster_id = new_id

    links: list[tuple[int, int, int]] = []
    for cluster in clusters:
        sents = sorted(cluster.sentence_set())
        for a in range(len(sents)):
            for b in range(a + 1, len(sents)):
                links.append((sents[a], sents[b], cluster.cluster_id))
    links.sort()

    return ContextGraph(
        snippet_index=snippet.index,
        node_lengths=[len(s.tokens) for s in sentences],
        punchline=len(sentences) - 1,
        clusters=clusters,
        links=links,
    )
