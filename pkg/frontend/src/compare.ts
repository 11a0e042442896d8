// Turns the service's evaluation response into display classes for the
// renderer. The semantic work — name alignment and all scores — is done by
// the service; this module only reads the alignment back onto the drawn
// edges to decide which styling each one gets.

import { edgeKey, nameKey, type EdgeSpec } from "./dot";
import type { EvaluateResponse } from "./types";

export type EdgeClass = "matched" | "flipped" | "extra";

export interface ComparisonOverlay {
  /** keyed by edgeKey(source, target) of the generated edge */
  edgeClasses: Map<string, EdgeClass>;
  /** truth links absent from the generation, endpoints renamed to generated
   *  spellings where the alignment provides one */
  missingEdges: EdgeSpec[];
  /** generated variable names with no truth counterpart */
  unmatchedGenerated: Set<string>;
  /** truth variable names with no generated counterpart (drawn as ghosts) */
  unmatchedTruth: string[];
}

export function buildOverlay(
  generatedEdges: EdgeSpec[],
  truthEdges: EdgeSpec[],
  evaluation: EvaluateResponse,
): ComparisonOverlay {
  const genToTruth = new Map<string, string>();
  const truthToGen = new Map<string, string>();
  for (const [gen, truth] of evaluation.matching.pairs) {
    genToTruth.set(nameKey(gen), nameKey(truth));
    truthToGen.set(nameKey(truth), gen);
  }

  const truthPolarity = new Map<string, EdgeSpec["polarity"]>();
  for (const edge of truthEdges) {
    truthPolarity.set(edgeKey(edge.source, edge.target), edge.polarity);
  }

  const edgeClasses = new Map<string, EdgeClass>();
  const covered = new Set<string>();
  for (const edge of generatedEdges) {
    const mappedSource = genToTruth.get(nameKey(edge.source));
    const mappedTarget = genToTruth.get(nameKey(edge.target));
    const key = edgeKey(edge.source, edge.target);
    if (mappedSource === undefined || mappedTarget === undefined) {
      edgeClasses.set(key, "extra");
      continue;
    }
    const truthKey = edgeKey(mappedSource, mappedTarget);
    const polarity = truthPolarity.get(truthKey);
    if (polarity === undefined) {
      edgeClasses.set(key, "extra");
    } else {
      covered.add(truthKey);
      edgeClasses.set(key, polarity === edge.polarity ? "matched" : "flipped");
    }
  }

  const missingEdges: EdgeSpec[] = [];
  for (const edge of truthEdges) {
    if (covered.has(edgeKey(edge.source, edge.target))) continue;
    missingEdges.push({
      source: truthToGen.get(nameKey(edge.source)) ?? edge.source,
      target: truthToGen.get(nameKey(edge.target)) ?? edge.target,
      polarity: edge.polarity,
    });
  }

  return {
    edgeClasses,
    missingEdges,
    unmatchedGenerated: new Set(evaluation.matching.unmatched_generated.map(nameKey)),
    unmatchedTruth: evaluation.matching.unmatched_truth,
  };
}
