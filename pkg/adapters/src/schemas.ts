import { z } from "zod";

/** Mirrors the toolkit's instance record schema (oodeval.io.read_instances). */
export const instanceSchema = z.object({
  id: z.string(),
  dataset: z.string(),
  split: z.string(),
  hypothesis: z.string(),
  premise: z.string(),
  label: z.string().optional(),
  explanation: z.string().optional(),
  native: z.unknown().optional(),
  premises: z.array(z.string()).optional(),
});
export type InstanceRecord = z.infer<typeof instanceSchema>;

export const embeddingHeaderSchema = z.object({
  dimension: z.number().int().positive(),
  model_id: z.string(),
});

export const embeddingRowSchema = z.object({
  id: z.string(),
  vector: z.array(z.number().finite()),
});

export const SCORE_RANGES: Record<string, { min: number; max: number; integral: boolean }> = {
  acceptability: { min: 0, max: 1, integral: false },
  first_token_prob: { min: 0, max: 1, integral: false },
  themis: { min: 1, max: 5, integral: true },
};

export const scoreRecordSchema = z.object({
  id: z.string(),
  metric: z.string(),
  value: z.number().finite(),
});
export type ScoreRecordOut = z.infer<typeof scoreRecordSchema>;

export function checkScoreRange(metric: string, value: number): void {
  const range = SCORE_RANGES[metric];
  if (!range) return;
  if (value < range.min || value > range.max) {
    throw new Error(`${metric} value ${value} outside [${range.min}, ${range.max}]`);
  }
  if (range.integral && !Number.isInteger(value)) {
    throw new Error(`${metric} value ${value} must be an integer rating`);
  }
}

export const TEMPLATES = ["nli_template", "json_template"] as const;
export type TemplateName = (typeof TEMPLATES)[number];

export const generationRecordSchema = z.object({
  id: z.string(),
  model_id: z.string(),
  template: z.enum(TEMPLATES),
  raw_text: z.string(),
});

export function parseInstances(records: unknown[], path: string): InstanceRecord[] {
  return records.map((rec, i) => {
    const result = instanceSchema.safeParse(rec);
    if (!result.success) {
      throw new Error(`${path}:${i + 1}: ${result.error.issues[0].message}`);
    }
    return result.data;
  });
}
