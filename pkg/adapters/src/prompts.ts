import type { InstanceRecord, TemplateName } from "./schemas.js";

/**
 * Scorer and fine-tuning prompt templates, byte-identical to the ones the
 * evaluation toolkit renders (oodeval.parsing.render_prompt), so scores
 * computed here line up with prompts used elsewhere in the pipeline.
 */

export function acceptabilityPrompt(inst: InstanceRecord): string {
  if (!inst.label || !inst.explanation) {
    throw new Error(`${inst.id}: acceptability prompt needs label and explanation`);
  }
  return (
    `premise: ${inst.premise} hypothesis: ${inst.hypothesis} ` +
    `answer: ${inst.label} explanation: ${inst.explanation}`
  );
}

export function themisPrompt(inst: InstanceRecord): string {
  if (!inst.label || !inst.explanation) {
    throw new Error(`${inst.id}: themis prompt needs label and explanation`);
  }
  const fields: [string, string][] = [
    ["task", "Controllable Generation"],
    [
      "aspect",
      "Coherence: Given the explanation for the relationship between the " +
        "hypothesis and premise pair, how much does the generated explanation make sense?",
    ],
    ["source_des", "Hypothesis and Premise Pair"],
    [
      "source",
      `Hypothesis: ${inst.hypothesis}, Premise: ${inst.premise}, ` +
        `please explain why the Hypothesis is ${inst.label}.`,
    ],
    ["target_des", "Explanation"],
    ["target", inst.explanation],
  ];
  // ", " / ": " separators match the toolkit's serializer byte for byte
  const body = fields
    .map(([k, v]) => `${JSON.stringify(k)}: ${JSON.stringify(v)}`)
    .join(", ");
  return `{${body}}`;
}

/** The generation-time input prompt for each output template. */
export function generationPrompt(inst: InstanceRecord, template: TemplateName): string {
  if (template === "nli_template") {
    return `explain nli hypothesis: ${inst.hypothesis} premise: ${inst.premise}`;
  }
  return `### Premise: ${inst.premise}  Hypothesis: ${inst.hypothesis}\n### Response: `;
}

export const SCORER_PROMPTS = {
  acceptability: acceptabilityPrompt,
  themis: themisPrompt,
} as const;

export type ScorerName = keyof typeof SCORER_PROMPTS;
