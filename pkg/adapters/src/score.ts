import type { ModelClient } from "./client.js";
import { readJsonl, writeJsonlAtomic } from "./jsonl.js";
import { writeManifest, type AdapterManifest } from "./manifest.js";
import { SCORER_PROMPTS, type ScorerName } from "./prompts.js";
import { checkScoreRange, parseInstances, type InstanceRecord } from "./schemas.js";

const BATCH = 32;

export interface ScoreResult {
  manifest: AdapterManifest;
  scored: number;
  /** Instances skipped with the reason, also written to `<out>.errors.jsonl`. */
  errors: { id: string; error: string }[];
}

/**
 * Score each instance's explanation with the named scorer.
 *
 * Instances without the fields the scorer prompt needs become per-line
 * error records (the run continues); an out-of-range model output aborts
 * the run — values are never clamped.
 */
export async function scoreFile(
  instancesPath: string,
  outPath: string,
  client: ModelClient,
  scorer: ScorerName,
  modelId: string,
): Promise<ScoreResult> {
  const instances = parseInstances(readJsonl(instancesPath), instancesPath);
  const renderPrompt = SCORER_PROMPTS[scorer];

  const errors: { id: string; error: string }[] = [];
  const usable: { inst: InstanceRecord; prompt: string }[] = [];
  for (const inst of instances) {
    try {
      usable.push({ inst, prompt: renderPrompt(inst) });
    } catch (err) {
      errors.push({ id: inst.id, error: String(err instanceof Error ? err.message : err) });
    }
  }

  const values: number[] = [];
  for (let start = 0; start < usable.length; start += BATCH) {
    const batch = usable.slice(start, start + BATCH);
    const scores = await client.score(batch.map((u) => u.prompt), scorer);
    if (scores.length !== batch.length) {
      throw new Error(`scorer returned ${scores.length} values for ${batch.length} prompts`);
    }
    scores.forEach((value, i) => {
      checkScoreRange(scorer, value); // out of range -> error, not clamping
      values.push(value);
      void i;
    });
  }

  writeJsonlAtomic(
    outPath,
    usable.map((u, i) => ({ id: u.inst.id, metric: scorer, value: values[i] })),
  );
  if (errors.length) {
    writeJsonlAtomic(`${outPath}.errors.jsonl`, errors);
  }
  const manifest = writeManifest(outPath, "scores", modelId, scorer, instancesPath);
  return { manifest, scored: usable.length, errors };
}
