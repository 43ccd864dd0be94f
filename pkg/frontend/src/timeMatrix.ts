/** View model for the speech-level time matrix: punchline line marks,
 * stacked text/audio bars, per-kind totals, and the keyword timeline. */

import {
  ALL_KINDS,
  AnnotationKind,
  SnippetDetail,
  SummaryPayload,
} from "./types";

export interface LineMark {
  snippets: number[];
  /** Normalized [0, 1] horizontal position of the mark's left edge. */
  x0: number;
  x1: number;
  /** Merged bands render thicker than single punchlines. */
  thick: boolean;
}

export interface StackedBar {
  snippet: number;
  textCount: number;
  audioCount: number;
}

export interface KindTotal {
  kind: AnnotationKind;
  total: number;
}

export interface KeywordLane {
  text: string;
  /** Normalized [0, 1] position of the first occurrence. */
  anchorX: number;
  frequency: number;
}

export interface TimeMatrixView {
  lineMarks: LineMark[];
  stackedBars: StackedBar[];
  kindTotals: KindTotal[];
  /** Keywords in temporal order of first occurrence. */
  keywordLanes: KeywordLane[];
}

export function renderTimeMatrix(summary: SummaryPayload): TimeMatrixView {
  const d = summary.duration_s;
  if (d <= 0) throw new Error("summary has non-positive duration");
  const lineMarks = summary.merged_bands.map((band) => ({
    snippets: band.snippets,
    x0: band.start_s / d,
    x1: band.end_s / d,
    thick: band.snippets.length > 1,
  }));
  const stackedBars = summary.punchlines.map((row) => ({
    snippet: row.snippet,
    textCount: row.text_feature_count,
    audioCount: row.audio_feature_count,
  }));
  const kindTotals = ALL_KINDS.map((kind) => ({
    kind,
    total: summary.feature_totals[kind] ?? 0,
  }));
  const keywordLanes = [...summary.keywords]
    .sort((a, b) => a.anchor_time_s - b.anchor_time_s)
    .map((kw) => ({
      text: kw.text,
      anchorX: kw.anchor_time_s / d,
      frequency: kw.frequency,
    }));
  return { lineMarks, stackedBars, kindTotals, keywordLanes };
}

export interface OccurrenceMark {
  snippet: number;
  sentence: number;
  token: number;
  /** Occurrence highlights render as dashed outlines. */
  dashed: true;
}

function tokenMatches(
  tokens: { norm: string; lemma: string | null }[],
  start: number,
  parts: string[],
): boolean {
  if (start + parts.length > tokens.length) return false;
  return parts.every((part, k) => {
    const tok = tokens[start + k];
    return part === tok.norm || part === (tok.lemma ?? "").toLowerCase();
  });
}

/** All occurrences of a (possibly multiword) keyword across snippet
 * payloads; matching mirrors the server: case-insensitive on surface norm
 * or lemma, multiword keywords need consecutive tokens. */
export function keywordOccurrences(
  snippets: SnippetDetail[],
  keyword: string,
): OccurrenceMark[] {
  const parts = keyword.toLowerCase().split(/\s+/).filter(Boolean);
  if (parts.length === 0) return [];
  const marks: OccurrenceMark[] = [];
  for (const snippet of snippets) {
    snippet.sentences.forEach((sentence, sentencePos) => {
      for (let i = 0; i + parts.length <= sentence.tokens.length; i++) {
        if (tokenMatches(sentence.tokens, i, parts)) {
          marks.push({
            snippet: snippet.index,
            sentence: sentencePos,
            token: i,
            dashed: true,
          });
        }
      }
    });
  }
  return marks;
}

/** Hovering a kind in the totals bar highlights only punchlines that
 * actually carry that kind. */
export function punchlinesWithKind(
  summary: SummaryPayload,
  kind: AnnotationKind,
): number[] {
  return summary.punchlines
    .filter((row) => (row.kind_counts[kind] ?? 0) > 0)
    .map((row) => row.snippet);
}
