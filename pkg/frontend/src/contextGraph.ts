/** View model for a snippet's context linking graph: a summary row of
 * sentence rectangles with arcs, a repetitive-concept strip, and the
 * detailed sentences. */

import { ContextGraphPayload, SnippetDetail } from "./types";

/** Fixed categorical palette indexed by the payload's cluster color. */
export const CLUSTER_PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
] as const;

export function clusterColor(colorIndex: number): string {
  return CLUSTER_PALETTE[colorIndex % CLUSTER_PALETTE.length];
}

export interface SentenceRect {
  sentence: number;
  /** Width proportional to the sentence's token count. */
  width: number;
  isPunchline: boolean;
}

export interface Arc {
  from: number;
  to: number;
  clusterId: number;
  color: string;
}

export interface ConceptChip {
  clusterId: number;
  sentence: number;
  text: string;
  color: string;
}

export interface ContextGraphView {
  rects: SentenceRect[];
  arcs: Arc[];
  /** Concept strip: one chip per cluster member, with sentence ticks. */
  strip: ConceptChip[];
}

export function renderContextGraph(graph: ContextGraphPayload): ContextGraphView {
  const rects = graph.node_lengths.map((len, sentence) => ({
    sentence,
    width: len,
    isPunchline: sentence === graph.punchline,
  }));
  const colorById = new Map(graph.clusters.map((c) => [c.id, clusterColor(c.color)]));
  const arcs = graph.links.map(([from, to, clusterId]) => {
    const color = colorById.get(clusterId);
    if (color === undefined) {
      throw new Error(`link references unknown cluster ${clusterId}`);
    }
    return { from, to, clusterId, color };
  });
  const strip = graph.clusters.flatMap((c) =>
    c.members.map((m) => ({
      clusterId: c.id,
      sentence: m.sentence,
      text: m.substituted_text,
      color: clusterColor(c.color),
    })),
  );
  return { rects, arcs, strip };
}

/** Hovering a sentence rectangle highlights every arc touching it. */
export function arcsTouchingSentence(view: ContextGraphView, sentence: number): Arc[] {
  return view.arcs.filter((a) => a.from === sentence || a.to === sentence);
}

/** Hovering a concept chip highlights its co-members and the cluster's arcs. */
export function highlightCluster(
  view: ContextGraphView,
  clusterId: number,
): { chips: ConceptChip[]; arcs: Arc[] } {
  return {
    chips: view.strip.filter((chip) => chip.clusterId === clusterId),
    arcs: view.arcs.filter((a) => a.clusterId === clusterId),
  };
}

/** Convenience: build the graph view for a snippet detail payload. */
export function renderSnippetGraph(snippet: SnippetDetail): ContextGraphView {
  return renderContextGraph(snippet.context_graph);
}
