/** View model for one annotated sentence: each of the twelve annotation
 * kinds maps to a distinct visual mark on its target words. */

import { Annotation, AnnotationKind, SentencePayload } from "./types";

export type MarkShape =
  | { type: "bracket-pair" } // disconnection: the incongruous word pair
  | { type: "underline-pair" } // intra_repetition
  | { type: "vertical-offset"; direction: "up" | "down" } // polarity
  | { type: "italic-badge" } // subjectivity
  | { type: "initial-dot" } // alliteration chain
  | { type: "final-dot" } // rhyme chain
  | { type: "speed-arrow"; direction: "right" | "left" } // faster / slower
  | { type: "pause-rect"; width: number } // pause, width ∝ seconds
  | { type: "loudness-wedge"; direction: "up" | "down" } // louder / softer
  | { type: "pitch-star" }; // stress

/** Horizontal pixels of pause rectangle per second of silence. */
export const PAUSE_WIDTH_PER_SECOND = 40;

export function markFor(annotation: Annotation): MarkShape {
  switch (annotation.kind) {
    case "disconnection":
      return { type: "bracket-pair" };
    case "intra_repetition":
      return { type: "underline-pair" };
    case "polarity":
      return {
        type: "vertical-offset",
        direction: annotation.magnitude >= 0 ? "up" : "down",
      };
    case "subjectivity":
      return { type: "italic-badge" };
    case "alliteration":
      return { type: "initial-dot" };
    case "rhyme":
      return { type: "final-dot" };
    case "faster":
      return { type: "speed-arrow", direction: "right" };
    case "slower":
      return { type: "speed-arrow", direction: "left" };
    case "pause":
      return {
        type: "pause-rect",
        width: annotation.magnitude * PAUSE_WIDTH_PER_SECOND,
      };
    case "louder":
      return { type: "loudness-wedge", direction: "up" };
    case "softer":
      return { type: "loudness-wedge", direction: "down" };
    case "stress":
      return { type: "pitch-star" };
  }
}

export interface DecoratedToken {
  surface: string;
  marks: { kind: AnnotationKind; shape: MarkShape }[];
}

export interface DecoratedSentence {
  tokens: DecoratedToken[];
  isPunchline: boolean;
  /** Playback control streams the sentence's audio-clip endpoint. */
  playback: { enabled: boolean; clipPath: string | null };
}

export function renderInlineAnnotations(
  speechId: string,
  snippetIndex: number,
  sentencePos: number,
  sentence: SentencePayload,
  audioRetained: boolean = true,
): DecoratedSentence {
  const tokens: DecoratedToken[] = sentence.tokens.map((tok) => ({
    surface: tok.surface,
    marks: [],
  }));
  for (const annotation of sentence.annotations) {
    const shape = markFor(annotation);
    for (const target of annotation.targets) {
      if (target < 0 || target >= tokens.length) {
        throw new Error(
          `annotation ${annotation.kind} targets token ${target} of ${tokens.length}`,
        );
      }
      tokens[target].marks.push({ kind: annotation.kind, shape });
    }
  }
  return {
    tokens,
    isPunchline: sentence.is_punchline,
    playback: {
      enabled: audioRetained,
      clipPath: audioRetained
        ? `/speeches/${speechId}/snippets/${snippetIndex}/audio/${sentencePos}`
        : null,
    },
  };
}
