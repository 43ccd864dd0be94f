import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from punchkit.contextgraph import (
    CorefChain,
    DependencyTree,
    PhraseSpan,
    apply_coreference,
    build_context_graph,
    cluster_concepts,
    fallback_subphrases,
    induce_subphrases,
    parse_conllu,
    parse_coref_chains,
    reduce_redundancy,
)
from punchkit.errors import ValidationError
from punchkit.ingest import Snippet
from punchkit.textfeats import ThresholdConfig

from conftest import make_sentence

CONFIG = ThresholdConfig()


def conllu_block(rows):
    return "\n".join(
        f"{i + 1}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_"
        for i, (form, lemma, upos, head, rel) in enumerate(rows)
    ) + "\n"


SIMPLE = conllu_block(
    [
        ("The", "the", "DET", 2, "det"),
        ("cat", "cat", "NOUN", 3, "nsubj"),
        ("sleeps.", "sleep", "VERB", 0, "root"),
    ]
)


class TestConllu:
    def test_block_count(self):
        trees = parse_conllu(SIMPLE + "\n" + SIMPLE)
        assert len(trees) == 2
        assert trees[0].heads == (1, 2, -1)

    def test_cycle_rejected(self):
        bad = conllu_block(
            [("a", "a", "NOUN", 2, "dep"), ("b", "b", "NOUN", 1, "dep"),
             ("c", "c", "VERB", 0, "root")]
        )
        with pytest.raises(ValidationError):
            parse_conllu(bad)

    def test_self_head_rejected(self):
        bad = conllu_block(
            [("a", "a", "NOUN", 1, "dep"), ("b", "b", "VERB", 0, "root")]
        )
        with pytest.raises(ValidationError):
            parse_conllu(bad)

    def test_multiple_roots_rejected(self):
        bad = conllu_block(
            [("a", "a", "VERB", 0, "root"), ("b", "b", "VERB", 0, "root")]
        )
        with pytest.raises(ValidationError):
            parse_conllu(bad)

    def test_sentence_count_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            parse_conllu(SIMPLE, expected_sentences=2)

    def test_ranges_and_comments_skipped(self):
        text = "# comment\n1-2\tdella\t_\t_\t_\t_\t_\t_\t_\t_\n" + SIMPLE
        assert len(parse_conllu(text)) == 1


class TestSubphrases:
    def test_noun_and_verb_subtrees(self, lexicons):
        tree = parse_conllu(SIMPLE)[0]
        s = make_sentence(["The", "cat", "sleeps."], lexicons=lexicons)
        spans = induce_subphrases(tree, s)
        assert (0, 2) in spans  # verb subtree = whole sentence
        assert (1, 1) in spans  # the noun itself
        assert (2, 2) in spans
        assert (0, 1) in spans  # noun subtree "The cat"

    def test_long_subtree_truncates_to_nominal_core(self, lexicons):
        rows = [("w%d" % i, "w%d" % i, "X", 8, "dep") for i in range(7)]
        rows += [("big", "big", "ADJ", 9, "amod"), ("dog", "dog", "NOUN", 0, "root")]
        tree = parse_conllu(conllu_block(rows))[0]
        s = make_sentence([r[0] for r in rows], lexicons=lexicons)
        spans = induce_subphrases(tree, s, max_len=6)
        assert (7, 8) in spans  # "big dog" core
        assert all(hi - lo + 1 <= 6 for lo, hi in spans)

    def test_spans_contiguous_and_in_bounds(self, italy_doc):
        for sn in italy_doc["snippets"]:
            lengths = sn["context_graph"]["node_lengths"]
            for c in sn["context_graph"]["clusters"]:
                for m in c["members"]:
                    assert 0 <= m["first"] <= m["last"] < lengths[m["sentence"]]

    def test_fallback_emits_content_tokens_and_trigrams(self, lexicons):
        s = make_sentence(["the", "cop", "is", "here"], lexicons=lexicons)
        spans = fallback_subphrases(s, lexicons)
        assert (1, 1) in spans
        assert (0, 2) in spans


class TestCoreference:
    def test_chain_parsing(self):
        chains = parse_coref_chains("the Italian community\t1:4-6;2:0-0\n")
        assert chains[0].representative == "the Italian community"
        assert chains[0].mentions == ((1, 4, 6), (2, 0, 0))

    def test_single_mention_rejected(self):
        with pytest.raises(ValidationError):
            parse_coref_chains("x\t1:0-0\n")

    def test_missing_tab_rejected(self):
        with pytest.raises(ValidationError):
            parse_coref_chains("no separator here\n")

    def test_possessive_substitution(self, lexicons):
        sentences = [
            make_sentence(["the", "Italian", "community."], index=0, lexicons=lexicons),
            make_sentence(["Their", "people"], index=1, lexicons=lexicons),
        ]
        spans = [PhraseSpan(sentence=1, first=0, last=1, text="Their people",
                            substituted_text="Their people")]
        chains = [CorefChain("the Italian community", ((0, 0, 2), (1, 0, 0)))]
        apply_coreference(spans, chains, sentences)
        assert spans[0].substituted_text == "Italian people"

    def test_span_without_pronoun_unchanged(self, lexicons):
        sentences = [make_sentence(["Germany", "wins"], index=0, lexicons=lexicons)]
        spans = [PhraseSpan(0, 0, 1, "Germany wins", "Germany wins")]
        apply_coreference(spans, [], sentences)
        assert spans[0].substituted_text == "Germany wins"

    def test_fallback_resolves_to_preceding_noun(self, lexicons):
        s0 = make_sentence(["Rover", "is", "being", "good."], index=0, lexicons=lexicons)
        s1 = make_sentence(["He", "is", "being", "hungry."], index=1, lexicons=lexicons)
        s0.tokens[0].pos = "NOUN"
        spans = [PhraseSpan(1, 0, 0, "He", "He")]
        apply_coreference(spans, None, [s0, s1])
        assert spans[0].substituted_text == "Rover"


def naive_density_clusters(points, eps, min_pts):
    """O(n^2) reference: connected components over core points."""
    n = len(points)
    X = np.asarray(points, dtype=float)
    X = X / np.linalg.norm(X, axis=1)[:, None]
    dist = 1.0 - X @ X.T
    neighbors = [list(np.flatnonzero(dist[i] <= eps)) for i in range(n)]
    core = [len(neighbors[i]) >= min_pts for i in range(n)]
    labels = [-1] * n
    current = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        stack = [i]
        labels[i] = current
        while stack:
            j = stack.pop()
            if not core[j]:
                continue
            for k in neighbors[j]:
                if labels[k] == -1:
                    labels[k] = current
                    stack.append(k)
        current += 1
    return labels


def partitions_equal(a, b):
    mapping = {}
    reverse = {}
    for x, y in zip(a, b):
        if (x == -1) != (y == -1):
            return False
        if x == -1:
            continue
        if mapping.setdefault(x, y) != y or reverse.setdefault(y, x) != x:
            return False
    return True


class TestClustering:
    def test_orthogonal_singletons_are_noise(self):
        pts = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        assert cluster_concepts(pts, 0.35, 2) == [-1, -1]

    def test_identical_points_cluster(self):
        pts = [np.array([1.0, 0.0])] * 3 + [np.array([0.0, 1.0])]
        labels = cluster_concepts(pts, 0.35, 2)
        assert labels[:3] == [0, 0, 0] and labels[3] == -1

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_matches_naive_reference(self, data):
        dims = data.draw(st.integers(2, 10))
        n = data.draw(st.integers(1, 15))
        pts = [
            np.array(data.draw(st.lists(
                st.floats(-1, 1).filter(lambda v: abs(v) > 1e-3),
                min_size=dims, max_size=dims,
            )))
            for _ in range(n)
        ]
        pts = [p for p in pts if np.linalg.norm(p) > 1e-6]
        if not pts:
            return
        eps = data.draw(st.sampled_from([0.1, 0.35, 0.6]))
        min_pts = data.draw(st.integers(1, 4))
        assert partitions_equal(
            cluster_concepts(pts, eps, min_pts),
            naive_density_clusters(pts, eps, min_pts),
        )


class TestRedundancy:
    @staticmethod
    def span(sentence, first, last, text, vec):
        return PhraseSpan(sentence, first, last, text, text, np.asarray(vec, float))

    def test_one_member_per_sentence_max_centroid_sim(self):
        spans = [
            self.span(0, 0, 1, "a cop", [1.0, 0.2]),
            self.span(0, 1, 1, "cop", [1.0, 0.0]),
            self.span(1, 0, 0, "cop", [1.0, 0.0]),
        ]
        clusters = reduce_redundancy(spans, [0, 0, 0])
        (cluster,) = clusters
        texts = {(m.sentence, m.text) for m in cluster.members}
        assert len({m.sentence for m in cluster.members}) == len(cluster.members)
        assert (1, "cop") in texts

    def test_tie_prefers_shortest_then_earliest(self):
        spans = [
            self.span(0, 0, 2, "the angry cop", [1.0, 0.0]),
            self.span(0, 2, 2, "cop", [1.0, 0.0]),
            self.span(1, 0, 0, "cop", [1.0, 0.0]),
        ]
        (cluster,) = reduce_redundancy(spans, [0, 0, 0])
        assert {(m.sentence, m.text) for m in cluster.members} == {(0, "cop"), (1, "cop")}

    def test_single_sentence_cluster_dropped(self):
        spans = [
            self.span(2, 0, 0, "cop", [1.0, 0.0]),
            self.span(2, 3, 3, "cop", [1.0, 0.0]),
        ]
        assert reduce_redundancy(spans, [0, 0]) == []

    def test_colors_by_first_occurrence(self, italy_doc):
        clusters = italy_doc["snippets"][0]["context_graph"]["clusters"]
        assert [c["color"] for c in clusters] == list(range(len(clusters)))
        firsts = [(c["members"][0]["sentence"], c["members"][0]["first"]) for c in clusters]
        assert firsts == sorted(firsts)


class TestGraphInvariants:
    def test_links_match_cluster_membership(self, cop_doc, italy_doc):
        for doc in (cop_doc, italy_doc):
            for sn in doc["snippets"]:
                graph = sn["context_graph"]
                by_id = {c["id"]: c for c in graph["clusters"]}
                for i, j, cid in graph["links"]:
                    assert i < j
                    sents = {m["sentence"] for m in by_id[cid]["members"]}
                    assert i in sents and j in sents
                for c in graph["clusters"]:
                    sents = sorted({m["sentence"] for m in c["members"]})
                    expected = [
                        [a, b, c["id"]]
                        for k, a in enumerate(sents)
                        for b in sents[k + 1:]
                    ]
                    got = [l for l in graph["links"] if l[2] == c["id"]]
                    assert got == expected

    def test_cluster_members_do_not_overlap(self, italy_doc):
        for sn in italy_doc["snippets"]:
            for c in sn["context_graph"]["clusters"]:
                seen = {}
                for m in c["members"]:
                    for t in range(m["first"], m["last"] + 1):
                        assert (m["sentence"], t) not in seen
                        seen[(m["sentence"], t)] = True

    def test_single_sentence_snippet_has_no_links(self, lexicons):
        s = make_sentence(["the", "cop", "was", "a", "cop"], lexicons=lexicons)
        snippet = Snippet(index=0, sentences=[s])
        graph = build_context_graph(snippet, None, None, lexicons, CONFIG)
        assert graph.clusters == [] and graph.links == []

    def test_deterministic(self, demo_dirs, lexicons):
        from punchkit.pipeline import BundlePaths, process_bundle

        paths = BundlePaths.from_dir(demo_dirs["italy-demo"])
        doc1, _ = process_bundle(paths, lexicons)
        doc2, _ = process_bundle(paths, lexicons)
        assert doc1["snippets"] == doc2["snippets"]
