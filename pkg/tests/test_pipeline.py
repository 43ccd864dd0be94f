"""End-to-end document construction and recomputation."""
import copy
import shutil

import pytest

from punchkit.errors import ValidationError
from punchkit.pipeline import (
    BundlePaths,
    PipelineConfig,
    document_summary,
    process_bundle,
    rebuild_snippets,
    recompute_document,
)
from punchkit.textfeats import ALL_KINDS, AUDIO_KINDS, TEXT_KINDS, ThresholdConfig


def count_kinds(doc, kinds):
    total = 0
    for sn in doc["snippets"]:
        for sent in sn["sentences"]:
            total += sum(1 for a in sent["annotations"] if a["kind"] in kinds)
    return total


class TestConfig:
    def test_round_trip(self):
        cfg = PipelineConfig(
            thresholds=ThresholdConfig(pause_min_s=0.8, disconnect_max_sim=0.2),
            textrank_top_k=7,
            merge_resolution_s=3.5,
        )
        again = PipelineConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_partial_dict_keeps_defaults(self):
        cfg = PipelineConfig.from_dict({"pause_min_s": 0.9})
        assert cfg.thresholds.pause_min_s == 0.9
        assert cfg.thresholds.repeat_min_sim == ThresholdConfig().repeat_min_sim
        assert cfg.textrank_top_k == PipelineConfig().textrank_top_k

    def test_invalid_thresholds_rejected(self):
        with pytest.raises(ValidationError):
            PipelineConfig.from_dict({"pause_min_s": -1.0})


class TestBundlePaths:
    def test_missing_required_file(self, demo_dirs, tmp_path):
        broken = tmp_path / "broken"
        shutil.copytree(demo_dirs["cop-demo"], broken)
        (broken / "alignment.csv").unlink()
        with pytest.raises(ValidationError) as exc:
            BundlePaths.from_dir(broken)
        assert exc.value.stage == "ingest"
        assert "alignment.csv" in str(exc.value)

    def test_optional_files_detected(self, demo_dirs):
        cop = BundlePaths.from_dir(demo_dirs["cop-demo"])
        italy = BundlePaths.from_dir(demo_dirs["italy-demo"])
        assert cop.conllu is None
        assert italy.conllu is not None and italy.coref is not None
        assert italy.phrase_vectors is not None


class TestDocumentSchema:
    def test_top_level_fields(self, cop_doc):
        assert cop_doc["schema_version"] == 1
        assert cop_doc["revision"] == 1
        assert cop_doc["meta"]["id"] == "cop-demo"
        assert len(cop_doc["laughter_times"]) == 2
        assert len(cop_doc["snippets"]) == 2
        assert len(cop_doc["tail_sentences"]) == 1
        assert cop_doc["audio"]["retained"] is True

    def test_laughter_times_are_punchline_ends(self, cop_doc):
        for t, sn in zip(cop_doc["laughter_times"], cop_doc["snippets"]):
            assert t == pytest.approx(sn["sentences"][-1]["span_s"][1])

    def test_acoustics_align_with_tokens(self, cop_doc, italy_doc):
        for doc in (cop_doc, italy_doc):
            for sn in doc["snippets"]:
                for sent in sn["sentences"]:
                    assert len(sent["acoustics"]) == len(sent["tokens"])

    def test_annotations_sorted_and_valid(self, cop_doc, italy_doc):
        for doc in (cop_doc, italy_doc):
            for sn in doc["snippets"]:
                for sent in sn["sentences"]:
                    keys = [(a["kind"], a["targets"][0]) for a in sent["annotations"]]
                    assert keys == sorted(keys)
                    for a in sent["annotations"]:
                        assert a["kind"] in ALL_KINDS
                        assert all(
                            0 <= t < len(sent["tokens"]) for t in a["targets"]
                        )

    def test_document_is_json_serializable(self, cop_doc, italy_doc):
        import json

        for doc in (cop_doc, italy_doc):
            json.loads(json.dumps(doc))

    def test_parse_info_stored_for_parsed_bundle(self, italy_doc, cop_doc):
        assert italy_doc["parses"] is not None
        assert italy_doc["coref_chains"] is not None
        assert italy_doc["phrase_overrides"] is not None
        assert cop_doc["parses"] is None

    def test_wav_bytes_returned(self, cop_result):
        _, wav = cop_result
        assert wav[:4] == b"RIFF" and wav[8:12] == b"WAVE"


class TestParseCountMismatch:
    def test_mismatched_parse_raises_with_stage(self, demo_dirs, lexicons, tmp_path):
        broken = tmp_path / "mismatch"
        shutil.copytree(demo_dirs["italy-demo"], broken)
        conllu = (broken / "parses.conllu").read_text()
        first_block = conllu.split("\n\n")[0]
        lines = [l for l in first_block.splitlines() if not l.startswith("#")]
        trimmed = "\n".join(lines[:-1]) + "\n\n" + "\n\n".join(conllu.split("\n\n")[1:])
        (broken / "parses.conllu").write_text(trimmed)
        with pytest.raises(ValidationError) as exc:
            process_bundle(BundlePaths.from_dir(broken), lexicons)
        assert exc.value.stage == "context-graph"


class TestRecompute:
    def test_same_config_is_idempotent(self, italy_doc, lexicons):
        cfg = PipelineConfig.from_dict(italy_doc["config"])
        redone = recompute_document(italy_doc, lexicons, cfg)
        assert redone["revision"] == italy_doc["revision"] + 1
        assert redone["snippets"] == italy_doc["snippets"]
        assert redone["config"] == italy_doc["config"]

    def test_revision_monotonic_across_rounds(self, cop_doc, lexicons):
        cfg = PipelineConfig.from_dict(cop_doc["config"])
        once = recompute_document(cop_doc, lexicons, cfg)
        twice = recompute_document(once, lexicons, cfg)
        assert twice["revision"] == cop_doc["revision"] + 2
        assert twice["snippets"] == once["snippets"]

    def test_input_document_not_mutated(self, cop_doc, lexicons):
        before = copy.deepcopy(cop_doc)
        recompute_document(cop_doc, lexicons, PipelineConfig())
        assert cop_doc == before

    def test_extreme_pause_threshold_silences_pauses(self, cop_doc, lexicons):
        cfg = PipelineConfig(thresholds=ThresholdConfig(pause_min_s=1e6))
        redone = recompute_document(cop_doc, lexicons, cfg)
        assert count_kinds(redone, {"pause"}) == 0
        assert count_kinds(cop_doc, {"pause"}) >= 1

    def test_tiny_pause_threshold_flags_every_gap(self, cop_doc, lexicons):
        cfg = PipelineConfig(thresholds=ThresholdConfig(pause_min_s=1e-9))
        redone = recompute_document(cop_doc, lexicons, cfg)
        assert count_kinds(redone, {"pause"}) > count_kinds(cop_doc, {"pause"})

    def test_loose_disconnect_threshold_cannot_lose_pairs(self, italy_doc, lexicons):
        strict = recompute_document(
            italy_doc, lexicons,
            PipelineConfig(thresholds=ThresholdConfig(disconnect_max_sim=1e-9)),
        )
        loose = recompute_document(
            italy_doc, lexicons,
            PipelineConfig(thresholds=ThresholdConfig(disconnect_max_sim=0.84)),
        )
        assert count_kinds(strict, {"disconnection"}) <= count_kinds(
            loose, {"disconnection"}
        )

    def test_graph_preserved_without_audio(self, italy_doc, lexicons):
        cfg = PipelineConfig.from_dict(italy_doc["config"])
        redone = recompute_document(italy_doc, lexicons, cfg)
        assert (
            redone["snippets"][0]["context_graph"]
            == italy_doc["snippets"][0]["context_graph"]
        )


class TestRebuildSnippets:
    def test_round_trip_counts(self, cop_doc):
        snippets, acoustics = rebuild_snippets(cop_doc)
        assert len(snippets) == len(cop_doc["snippets"]) == len(acoustics)
        for snippet, sn in zip(snippets, cop_doc["snippets"]):
            assert len(snippet.sentences) == len(sn["sentences"])
            assert snippet.punchline.is_punchline

    def test_token_timings_survive(self, italy_doc):
        snippets, _ = rebuild_snippets(italy_doc)
        stored = italy_doc["snippets"][0]["sentences"][0]["tokens"][0]
        rebuilt = snippets[0].sentences[0].tokens[0]
        assert rebuilt.start_s == stored["start_s"]
        assert rebuilt.end_s == stored["end_s"]


class TestDocumentSummary:
    def test_row_per_snippet(self, cop_doc):
        matrix = document_summary(cop_doc)
        assert [r.snippet for r in matrix.punchlines] == [0, 1]
        assert matrix.duration_s == cop_doc["meta"]["duration_s"]

    def test_totals_match_punchline_annotations(self, italy_doc):
        matrix = document_summary(italy_doc)
        punchline_anns = [
            a
            for sn in italy_doc["snippets"]
            for a in sn["sentences"][-1]["annotations"]
        ]
        assert sum(matrix.feature_totals.values()) == len(punchline_anns)
        total_split = sum(
            r.text_feature_count + r.audio_feature_count for r in matrix.punchlines
        )
        assert total_split == len(punchline_anns)

    def test_merge_resolution_override(self, cop_doc):
        wide = document_summary(cop_doc, merge_resolution_s=1e6)
        assert len(wide.merged_bands) == 1
        assert wide.merged_bands[0][2] == [0, 1]
