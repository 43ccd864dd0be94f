/** Payload types for the speech-analysis HTTP API. */

export const TEXT_KINDS = [
  "disconnection",
  "intra_repetition",
  "polarity",
  "subjectivity",
  "alliteration",
  "rhyme",
] as const;

export const AUDIO_KINDS = [
  "faster",
  "slower",
  "pause",
  "louder",
  "softer",
  "stress",
] as const;

export const ALL_KINDS = [...TEXT_KINDS, ...AUDIO_KINDS] as const;

export type AnnotationKind = (typeof ALL_KINDS)[number];

export interface SpeechMeta {
  id: string;
  title: string;
  speaker: string;
  category: string;
  views: number;
  duration_s: number;
}

export interface SpeechListing {
  id: string;
  meta: SpeechMeta;
  laughter_count: number;
  /** Punchline times normalized to [0, 1] of the speech duration. */
  barcode: number[];
  revision: number;
}

export interface Annotation {
  kind: AnnotationKind;
  targets: number[];
  magnitude: number;
  sentence_flag: boolean;
}

export interface TokenPayload {
  surface: string;
  norm: string;
  start_s: number;
  end_s: number;
  phones: string[];
  syllables: number;
  pos: string | null;
  lemma: string | null;
}

export interface SentencePayload {
  index: number;
  is_punchline: boolean;
  snippet_index: number | null;
  sentence_index: number | null;
  span_s: [number, number];
  tokens: TokenPayload[];
  annotations: Annotation[];
  acoustics: unknown[];
}

export interface ClusterMember {
  sentence: number;
  first: number;
  last: number;
  text: string;
  substituted_text: string;
}

export interface ConceptCluster {
  id: number;
  color: number;
  members: ClusterMember[];
}

export interface ContextGraphPayload {
  node_lengths: number[];
  punchline: number;
  clusters: ConceptCluster[];
  /** [sentence a, sentence b, cluster id] triples, a < b. */
  links: [number, number, number][];
}

export interface KeywordPayload {
  text: string;
  score: number;
  frequency: number;
  anchor_time_s: number;
}

export interface SnippetDetail {
  index: number;
  span_s: [number, number];
  sentences: SentencePayload[];
  context_graph: ContextGraphPayload;
  keywords: KeywordPayload[];
}

export interface PunchlineRow {
  snippet: number;
  time_s: number;
  text_feature_count: number;
  audio_feature_count: number;
  kind_counts: Record<AnnotationKind, number>;
}

export interface MergedBand {
  start_s: number;
  end_s: number;
  snippets: number[];
}

export interface SummaryPayload {
  duration_s: number;
  punchlines: PunchlineRow[];
  feature_totals: Record<AnnotationKind, number>;
  keywords: (KeywordPayload & { snippet: number })[];
  merged_bands: MergedBand[];
}
