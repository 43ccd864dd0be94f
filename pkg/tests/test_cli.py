"""Command-line workflow: demo, ingest, list, annotate, report, recompute."""
import csv
import json

import pytest
from click.testing import CliRunner

from punchkit.cli import main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, demo_dirs):
    """A store directory with both demo bundles ingested once."""
    root = tmp_path_factory.mktemp("cli")
    store = root / "speeches"
    runner = CliRunner()
    for bundle in demo_dirs.values():
        result = runner.invoke(main, ["--store", str(store), "ingest", str(bundle)])
        assert result.exit_code == 0, result.output
    return root, store


def run(store, *args):
    return CliRunner().invoke(main, ["--store", str(store), *args])


class TestDemo:
    def test_demo_writes_bundles(self, tmp_path):
        out = tmp_path / "bundles"
        result = CliRunner().invoke(main, ["--store", str(tmp_path / "s"), "demo", str(out)])
        assert result.exit_code == 0
        ids = {line.split("\t")[0] for line in result.output.splitlines()}
        assert ids == {"cop-demo", "italy-demo"}
        for bundle in out.iterdir():
            assert (bundle / "transcript.txt").exists()
            assert (bundle / "audio.wav").exists()


class TestIngestAndList:
    def test_ingest_echoes_id(self, workspace, demo_dirs):
        _, store = workspace
        result = run(store, "ingest", str(demo_dirs["cop-demo"]), "--id", "again")
        assert result.exit_code == 0
        assert result.output.strip() == "again"

    def test_ingest_missing_dir_fails_before_pipeline(self, workspace, tmp_path):
        _, store = workspace
        result = run(store, "ingest", str(tmp_path / "nowhere"))
        assert result.exit_code != 0

    def test_ingest_incomplete_bundle_exits_2(self, workspace, tmp_path):
        _, store = workspace
        empty = tmp_path / "empty"
        empty.mkdir()
        result = run(store, "ingest", str(empty))
        assert result.exit_code == 2
        assert "error:" in result.output

    def test_ingest_bad_config_exits_2(self, workspace, demo_dirs):
        _, store = workspace
        result = run(
            store, "ingest", str(demo_dirs["cop-demo"]),
            "--config", '{"pause_min_s": -5}',
        )
        assert result.exit_code == 2

    def test_list_shows_both(self, workspace):
        _, store = workspace
        result = run(store, "list")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert any(l.startswith("cop-demo\t") for l in lines)
        assert any(l.startswith("italy-demo\t") for l in lines)
        assert "2 punchlines" in result.output

    def test_list_bad_sort_exits_2(self, workspace):
        _, store = workspace
        result = run(store, "list", "--sort", "nope")
        assert result.exit_code == 2


class TestAnnotate:
    def test_marks_punchline_and_glyphs(self, workspace):
        _, store = workspace
        result = run(store, "annotate", "cop-demo")
        assert result.exit_code == 0
        assert "snippet 0" in result.output and "snippet 1" in result.output
        punchlines = [l for l in result.output.splitlines() if l.startswith("punchline>")]
        assert len(punchlines) == 2
        # the long pause before "I'll" and the shouted "okay?" carry glyphs
        first = punchlines[0]
        assert "_" in first and "^" in first
        # polarity (+) and subjectivity (?) mark the strong-sentiment word
        assert "f**king+?" in first

    def test_snippet_filter(self, workspace):
        _, store = workspace
        result = run(store, "annotate", "cop-demo", "--snippet", "1")
        assert result.exit_code == 0
        assert "snippet 1" in result.output
        assert "snippet 0" not in result.output

    def test_unknown_speech_exits_2(self, workspace):
        _, store = workspace
        result = run(store, "annotate", "ghost")
        assert result.exit_code == 2


class TestRecompute:
    def test_recompute_updates_revision(self, workspace, demo_dirs):
        _, store = workspace
        run(store, "ingest", str(demo_dirs["cop-demo"]), "--id", "cop-rc")
        result = run(store, "recompute", "cop-rc", "--config", '{"pause_min_s": 1e6}')
        assert result.exit_code == 0
        assert result.output.strip() == "cop-rc revision 2"
        doc = json.loads((store / "cop-rc.json").read_text())
        assert doc["config"]["pause_min_s"] == 1e6

    def test_recompute_requires_config(self, workspace):
        _, store = workspace
        result = run(store, "recompute", "cop-demo")
        assert result.exit_code != 0

    def test_recompute_invalid_config_exits_2(self, workspace):
        _, store = workspace
        result = run(store, "recompute", "cop-demo", "--config", '{"speed_M": -1}')
        assert result.exit_code == 2


class TestReport:
    def test_report_writes_csv_and_figures(self, workspace, tmp_path):
        _, store = workspace
        out = tmp_path / "rep"
        result = run(store, "report", "cop-demo", "--out", str(out))
        assert result.exit_code == 0, result.output
        names = {p.name for p in out.iterdir()}
        assert {"summary.csv", "keywords.csv", "barcode.png", "time_matrix.png"} <= names
        for name in names:
            if name.endswith(".png"):
                assert (out / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        with (out / "summary.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert [r["snippet"] for r in rows] == ["0", "1"]
        assert all(int(r["text_features"]) >= 0 for r in rows)

    def test_report_lists_written_paths(self, workspace, tmp_path):
        _, store = workspace
        out = tmp_path / "rep2"
        result = run(store, "report", "italy-demo", "--out", str(out))
        assert result.exit_code == 0
        printed = {line.rsplit("/", 1)[-1] for line in result.output.splitlines()}
        assert "summary.csv" in printed and "time_matrix.png" in printed

    def test_report_unknown_speech_exits_2(self, workspace, tmp_path):
        _, store = workspace
        result = run(store, "report", "ghost", "--out", str(tmp_path / "rep3"))
        assert result.exit_code == 2
