import { appendFileSync, existsSync, readFileSync, unlinkSync } from "node:fs";

import type { ModelClient } from "./client.js";
import { readJsonl, toJsonl, writeFileAtomic } from "./jsonl.js";
import { writeManifest, type AdapterManifest } from "./manifest.js";
import { generationPrompt } from "./prompts.js";
import { parseInstances, type TemplateName } from "./schemas.js";

const BATCH = 16;

interface Cursor {
  next_index: number;
  input_digest_count: number;
}

function cursorPath(outPath: string): string {
  return `${outPath}.cursor.json`;
}

/**
 * Run each instance's prompt through the model and record the raw output.
 *
 * Interruption-safe: completed records are flushed with an explicit cursor
 * (`<out>.cursor.json`), and a rerun appends from the cursor without
 * duplicating records. The cursor is removed on completion.
 */
export async function generateFile(
  instancesPath: string,
  outPath: string,
  client: ModelClient,
  template: TemplateName,
  modelId: string,
): Promise<AdapterManifest> {
  const instances = parseInstances(readJsonl(instancesPath), instancesPath);

  let start = 0;
  if (existsSync(cursorPath(outPath)) && existsSync(outPath)) {
    const cursor = JSON.parse(readFileSync(cursorPath(outPath), "utf-8")) as Cursor;
    if (cursor.input_digest_count !== instances.length) {
      throw new Error(`cursor for a different input (${cursor.input_digest_count} records)`);
    }
    start = cursor.next_index;
  } else if (existsSync(outPath)) {
    // a finished file without a cursor must not be silently appended to
    throw new Error(`${outPath} already exists without a resume cursor`);
  } else {
    writeFileAtomic(outPath, "");
  }

  for (; start < instances.length; start += BATCH) {
    const batch = instances.slice(start, start + BATCH);
    let texts: string[];
    try {
      texts = await client.generate(batch.map((i) => generationPrompt(i, template)));
    } catch (err) {
      // leave the partial file plus cursor behind for a later resume
      writeFileAtomic(
        cursorPath(outPath),
        JSON.stringify({ next_index: start, input_digest_count: instances.length }) + "\n",
      );
      throw err;
    }
    if (texts.length !== batch.length) {
      throw new Error(`endpoint returned ${texts.length} texts for ${batch.length} prompts`);
    }
    appendFileSync(
      outPath,
      toJsonl(
        batch.map((inst, i) => ({
          id: inst.id,
          model_id: modelId,
          template,
          raw_text: texts[i],
        })),
      ),
      "utf-8",
    );
    writeFileAtomic(
      cursorPath(outPath),
      JSON.stringify({ next_index: start + batch.length, input_digest_count: instances.length }) + "\n",
    );
  }

  if (existsSync(cursorPath(outPath))) {
    unlinkSync(cursorPath(outPath));
  }
  return writeManifest(outPath, "generations", modelId, template, instancesPath);
}
