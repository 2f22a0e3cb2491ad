import type { ModelClient } from "./client.js";
import { readJsonl, writeJsonlAtomic } from "./jsonl.js";
import { writeManifest, type AdapterManifest } from "./manifest.js";
import { parseInstances } from "./schemas.js";

const BATCH = 32;

/**
 * Embed every instance into a fixed-dimension vector file.
 *
 * The embedded text is the concatenation "hypothesis premise". Output is
 * atomic: an encoder failure leaves no partial file behind.
 */
export async function embedFile(
  instancesPath: string,
  outPath: string,
  client: ModelClient,
  modelId: string,
): Promise<AdapterManifest> {
  const instances = parseInstances(readJsonl(instancesPath), instancesPath);
  const texts = instances.map((i) => `${i.hypothesis} ${i.premise}`);

  const vectors: number[][] = [];
  for (let start = 0; start < texts.length; start += BATCH) {
    const batch = await client.embed(texts.slice(start, start + BATCH));
    vectors.push(...batch);
  }
  if (vectors.length !== instances.length) {
    throw new Error(`encoder returned ${vectors.length} vectors for ${instances.length} inputs`);
  }
  const dimension = vectors.length ? vectors[0].length : 0;
  vectors.forEach((v, i) => {
    if (v.length !== dimension || v.some((x) => !Number.isFinite(x))) {
      throw new Error(`${instances[i].id}: bad vector (dimension/finite check failed)`);
    }
  });

  const rows: unknown[] = [{ dimension, model_id: modelId }];
  instances.forEach((inst, i) => rows.push({ id: inst.id, vector: vectors[i] }));
  writeJsonlAtomic(outPath, rows);
  return writeManifest(outPath, "embeddings", modelId, null, instancesPath);
}
