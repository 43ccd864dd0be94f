import { describe, expect, it } from "vitest";

import {
  PAUSE_WIDTH_PER_SECOND,
  markFor,
  renderInlineAnnotations,
} from "../src/inlineAnnotations";
import { Annotation, SnippetDetail } from "../src/types";

import copSnippet0Json from "./fixtures/cop-snippet-0.json";

const copSnippet0 = copSnippet0Json as unknown as SnippetDetail;
const punchline = copSnippet0.sentences[copSnippet0.sentences.length - 1];

function pause(magnitude: number): Annotation {
  return { kind: "pause", targets: [0], magnitude, sentence_flag: false };
}

describe("inline annotations", () => {
  it("maps each payload annotation to a mark on its target words", () => {
    const view = renderInlineAnnotations("cop-demo", 0, 4, punchline);
    const markCount = view.tokens.reduce((n, t) => n + t.marks.length, 0);
    const targetCount = punchline.annotations.reduce(
      (n, a) => n + a.targets.length,
      0,
    );
    expect(markCount).toBe(targetCount);
    for (const annotation of punchline.annotations) {
      for (const target of annotation.targets) {
        const kinds = view.tokens[target].marks.map((m) => m.kind);
        expect(kinds).toContain(annotation.kind);
      }
    }
  });

  it("uses a distinct mark shape per annotation kind", () => {
    const kinds: Annotation["kind"][] = [
      "disconnection",
      "intra_repetition",
      "polarity",
      "subjectivity",
      "alliteration",
      "rhyme",
      "faster",
      "slower",
      "pause",
      "louder",
      "softer",
      "stress",
    ];
    const shapes = kinds.map((kind) =>
      JSON.stringify(
        markFor({ kind, targets: [0], magnitude: 1, sentence_flag: false }),
      ),
    );
    expect(new Set(shapes).size).toBe(kinds.length);
  });

  it("offsets negative-polarity words downward", () => {
    const polarity = punchline.annotations.find((a) => a.kind === "polarity")!;
    expect(polarity.magnitude).toBeLessThan(0);
    expect(markFor(polarity)).toEqual({
      type: "vertical-offset",
      direction: "down",
    });
    // the marked word is the strong negative one
    expect(punchline.tokens[polarity.targets[0]].norm).toBe("f**king");
  });

  it("scales pause width proportionally to magnitude", () => {
    const short = markFor(pause(0.6));
    const long = markFor(pause(1.2));
    expect(short).toEqual({
      type: "pause-rect",
      width: 0.6 * PAUSE_WIDTH_PER_SECOND,
    });
    if (short.type === "pause-rect" && long.type === "pause-rect") {
      expect(long.width / short.width).toBeCloseTo(2.0, 10);
    } else {
      throw new Error("expected pause-rect marks");
    }
  });

  it("renders the fixture's 0.6 s pause with proportional width", () => {
    const payloadPause = punchline.annotations.find((a) => a.kind === "pause")!;
    expect(payloadPause.magnitude).toBeCloseTo(0.6, 2);
    const view = renderInlineAnnotations("cop-demo", 0, 4, punchline);
    const mark = view.tokens[payloadPause.targets[0]].marks.find(
      (m) => m.kind === "pause",
    )!;
    expect(mark.shape).toEqual({
      type: "pause-rect",
      width: payloadPause.magnitude * PAUSE_WIDTH_PER_SECOND,
    });
  });

  it("renders unannotated sentences as plain text", () => {
    const plain = {
      ...punchline,
      annotations: [],
    };
    const view = renderInlineAnnotations("cop-demo", 0, 4, plain);
    expect(view.tokens.every((t) => t.marks.length === 0)).toBe(true);
  });

  it("points playback at the sentence clip endpoint and disables it without audio", () => {
    const withAudio = renderInlineAnnotations("cop-demo", 0, 4, punchline, true);
    expect(withAudio.playback).toEqual({
      enabled: true,
      clipPath: "/speeches/cop-demo/snippets/0/audio/4",
    });
    const withoutAudio = renderInlineAnnotations("cop-demo", 0, 4, punchline, false);
    expect(withoutAudio.playback).toEqual({ enabled: false, clipPath: null });
  });

  it("rejects annotations whose targets fall outside the sentence", () => {
    const broken = {
      ...punchline,
      annotations: [
        { kind: "pause", targets: [99], magnitude: 0.6, sentence_flag: false },
      ] as Annotation[],
    };
    expect(() => renderInlineAnnotations("cop-demo", 0, 4, broken)).toThrow();
  });
});
